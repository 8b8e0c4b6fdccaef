#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bloq/circuit.hpp"

namespace bloq {

using json = nlohmann::json;

namespace detail {

/// Typed field lookup that reports failures as ParseError with a JSON pointer.
template <typename T>
T field(const json& obj, const char* key, const std::string& path) {
    const std::string where = path + "/" + key;
    if (!obj.is_object()) throw ParseError("expected an object", 0, path);
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(std::string("missing field '") + key + "'", 0, where);
    try {
        return it->template get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad field '") + key + "': " + e.what(), 0, where);
    }
}

template <typename T>
T optional_field(const json& obj, const char* key, const std::string& path, T fallback) {
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    return field<T>(obj, key, path);
}

inline json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
}

}  // namespace detail

inline json gate_to_json(const Gate& g) {
    json j{{"kind", to_string(g.kind)}, {"targets", g.targets}};
    if (!g.controls.empty()) j["controls"] = g.controls;
    if (g.has_angle()) j["angle"] = g.angle;
    return j;
}

inline Gate gate_from_json(const json& j, const std::string& path) {
    Gate g;
    const auto kind = detail::field<std::string>(j, "kind", path);
    if (!parse_gate_kind(kind, g.kind)) throw ParseError("unknown gate kind '" + kind + "'", 0, path + "/kind");
    g.targets = detail::field<std::vector<unsigned>>(j, "targets", path);
    g.controls = detail::optional_field<std::vector<unsigned>>(j, "controls", path, {});
    g.angle = detail::optional_field<double>(j, "angle", path, 0.0);
    return g;
}

inline json program_to_json(const ProgramSpec& p) {
    return {{"kind", to_string(p.kind)}, {"input", p.input}};
}

inline ProgramKind parse_program_kind(const std::string& s, const std::string& path) {
    if (s == "qft") return ProgramKind::QFT;
    if (s == "grover") return ProgramKind::Grover;
    if (s == "custom") return ProgramKind::Custom;
    throw ParseError("unknown program kind '" + s + "'", 0, path);
}

/// `n` comes from the enclosing document.
inline ProgramSpec program_from_json(const json& j, unsigned n, const std::string& path) {
    ProgramSpec p;
    p.kind = parse_program_kind(detail::field<std::string>(j, "kind", path), path + "/kind");
    p.n = n;
    p.input = detail::field<std::string>(j, "input", path);
    return p;
}

inline json circuit_to_json(const Circuit& c) {
    json preamble = json::array();
    for (const auto& g : c.preamble()) preamble.push_back(gate_to_json(g));
    json segments = json::array();
    for (std::size_t k = 0; k < c.num_segments(); ++k) {
        json seg = json::array();
        for (const auto& g : c.segment(k)) seg.push_back(gate_to_json(g));
        segments.push_back(std::move(seg));
    }
    return {{"n", c.num_qubits()},
            {"program", program_to_json(c.program())},
            {"preamble", std::move(preamble)},
            {"segments", std::move(segments)}};
}

/// Schema problems raise ParseError; structurally invalid circuits (bad qubit
/// indices, no segments, ...) raise ValidationError from the Circuit itself.
inline Circuit circuit_from_json(const json& j) {
    const auto n = detail::field<unsigned>(j, "n", "");
    const auto program = program_from_json(detail::field<json>(j, "program", ""), n, "/program");
    std::vector<Gate> preamble;
    const auto pj = detail::optional_field<json>(j, "preamble", "", json::array());
    if (!pj.is_array()) throw ParseError("preamble must be an array", 0, "/preamble");
    for (std::size_t i = 0; i < pj.size(); ++i)
        preamble.push_back(gate_from_json(pj[i], "/preamble/" + std::to_string(i)));
    const auto sj = detail::field<json>(j, "segments", "");
    if (!sj.is_array()) throw ParseError("segments must be an array", 0, "/segments");
    std::vector<std::vector<Gate>> segments;
    for (std::size_t k = 0; k < sj.size(); ++k) {
        const std::string p = "/segments/" + std::to_string(k);
        if (!sj[k].is_array()) throw ParseError("segment must be an array", 0, p);
        auto& seg = segments.emplace_back();
        for (std::size_t i = 0; i < sj[k].size(); ++i)
            seg.push_back(gate_from_json(sj[k][i], p + "/" + std::to_string(i)));
    }
    return Circuit(n, program, std::move(preamble), segments);
}

inline std::string serialize(const Circuit& c, int indent = -1) { return circuit_to_json(c).dump(indent); }

inline Circuit deserialize(const std::string& text) {
    return circuit_from_json(detail::parse_document(text));
}

}  // namespace bloq
