#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "bloq/circuit_json.hpp"
#include "bloq/simulator.hpp"

namespace bloq::faults {

enum class FaultCategory { Add, Remove, Replace };

inline std::string_view to_string(FaultCategory c) {
    switch (c) {
        case FaultCategory::Add: return "add";
        case FaultCategory::Remove: return "remove";
        case FaultCategory::Replace: return "replace";
    }
    return "?";
}

/// Gates a fault may insert.
inline constexpr GateKind kFaultGates[] = {GateKind::X, GateKind::Y, GateKind::Z,
                                           GateKind::CNOT, GateKind::S, GateKind::H};

inline bool is_fault_gate(GateKind k) {
    for (GateKind g : kFaultGates)
        if (g == k) return true;
    return false;
}

/// One gate-level mutation. Segment and position are 0-based; `position` is
/// the insertion index for Add and the affected gate's index otherwise. For
/// Remove, `qubits` records the removed gate's qubits.
struct FaultSpec {
    FaultCategory category = FaultCategory::Add;
    std::optional<GateKind> gate;
    std::size_t segment = 0;
    std::vector<unsigned> qubits;
    std::size_t position = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const FaultSpec&, const FaultSpec&) = default;
};

/// The gate a fault inserts; CNOT takes qubits (control, target).
inline Gate fault_gate(GateKind kind, const std::vector<unsigned>& qubits) {
    if (!is_fault_gate(kind)) throw ValidationError("gate " + std::string(bloq::to_string(kind)) + " is not in the fault set");
    if (kind == GateKind::CNOT) {
        if (qubits.size() != 2) throw ValidationError("cnot fault needs two qubits");
        return Gate::cnot(qubits[0], qubits[1]);
    }
    if (qubits.size() != 1) throw ValidationError("single-qubit fault needs one qubit");
    return Gate::single(kind, qubits[0]);
}

inline Circuit inject(const Circuit& c, const FaultSpec& f) {
    c.check_segment(f.segment);
    auto segments = c.segment_lists();
    auto& seg = segments[f.segment];
    auto checked_gate = [&] {
        if (!f.gate) throw ValidationError(std::string(to_string(f.category)) + " fault needs a gate type");
        if (*f.gate == GateKind::CNOT && c.num_qubits() < 2)
            throw ValidationError("cnot fault on a single-qubit circuit");
        Gate g = fault_gate(*f.gate, f.qubits);
        validate_gate(g, c.num_qubits());
        return g;
    };
    switch (f.category) {
        case FaultCategory::Add: {
            if (f.position > seg.size()) throw IndexError("insertion point beyond segment end");
            seg.insert(seg.begin() + static_cast<std::ptrdiff_t>(f.position), checked_gate());
            break;
        }
        case FaultCategory::Remove: {
            if (seg.empty()) throw ValidationError("cannot remove from an empty segment");
            if (f.position >= seg.size()) throw IndexError("gate position beyond segment end");
            seg.erase(seg.begin() + static_cast<std::ptrdiff_t>(f.position));
            break;
        }
        case FaultCategory::Replace: {
            if (seg.empty()) throw ValidationError("cannot replace in an empty segment");
            if (f.position >= seg.size()) throw IndexError("gate position beyond segment end");
            Gate g = checked_gate();
            if (g.kind == seg[f.position].kind) throw ValidationError("replacement gate must differ from the removed one");
            seg[f.position] = std::move(g);
            break;
        }
    }
    auto pre = c.preamble();
    return Circuit(c.num_qubits(), c.program(), std::vector<Gate>(pre.begin(), pre.end()), segments);
}

/// Per segment: one Add per fault-set gate at the segment end, one Remove and
/// one Replace at seeded-random positions. Single-qubit Adds target qubit k
/// on QFT segment k and a seeded-random qubit otherwise; CNOT Adds run from
/// that qubit to its successor mod n.
inline std::vector<FaultSpec> enumerate_faults(const Circuit& c, std::uint64_t seed) {
    const unsigned n = c.num_qubits();
    std::vector<FaultSpec> out;
    for (std::size_t k = 0; k < c.num_segments(); ++k) {
        Rng rng(derive_seed(seed, {k}));
        std::uniform_int_distribution<unsigned> any_qubit(0, n - 1);
        const auto seg = c.segment(k);
        for (GateKind kind : kFaultGates) {
            const unsigned q = c.program().kind == ProgramKind::QFT ? static_cast<unsigned>(k) : any_qubit(rng);
            if (kind == GateKind::CNOT) {
                if (n < 2) continue;
                out.push_back({FaultCategory::Add, kind, k, {q, (q + 1) % n}, seg.size(), seed});
            } else {
                out.push_back({FaultCategory::Add, kind, k, {q}, seg.size(), seed});
            }
        }
        if (seg.empty()) continue;
        std::uniform_int_distribution<std::size_t> any_pos(0, seg.size() - 1);
        const std::size_t rpos = any_pos(rng);
        out.push_back({FaultCategory::Remove, std::nullopt, k, seg[rpos].qubits(), rpos, seed});

        const std::size_t pos = any_pos(rng);
        const Gate& old = seg[pos];
        std::vector<GateKind> choices;
        for (GateKind g : kFaultGates)
            if (g != old.kind && (g != GateKind::CNOT || n >= 2)) choices.push_back(g);
        std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
        const GateKind kind = choices[pick(rng)];
        std::vector<unsigned> qs;
        const unsigned t = old.targets.front();
        if (kind != GateKind::CNOT) qs = {t};
        else if (!old.controls.empty()) qs = {old.controls.front(), t};
        else qs = {t, (t + 1) % n};
        out.push_back({FaultCategory::Replace, kind, k, qs, pos, seed});
    }
    return out;
}

/// Whether the mutant's ideal final state differs from the original's beyond
/// a global phase.
inline bool is_observable(const Circuit& original, const Circuit& mutant) {
    return run_statevector(original).overlap(run_statevector(mutant)) < 1.0 - 1e-9;
}

inline nlohmann::json fault_to_json(const FaultSpec& f) {
    return {{"category", to_string(f.category)},
            {"gate", f.gate ? nlohmann::json(bloq::to_string(*f.gate)) : nlohmann::json(nullptr)},
            {"segment", f.segment},
            {"qubits", f.qubits},
            {"position", f.position},
            {"seed", f.seed}};
}

inline FaultSpec fault_from_json(const nlohmann::json& j) {
    FaultSpec f;
    const auto cat = bloq::detail::field<std::string>(j, "category", "");
    if (cat == "add") f.category = FaultCategory::Add;
    else if (cat == "remove") f.category = FaultCategory::Remove;
    else if (cat == "replace") f.category = FaultCategory::Replace;
    else throw ParseError("unknown fault category '" + cat + "'", 0, "/category");
    if (j.contains("gate") && !j.at("gate").is_null()) {
        const auto g = bloq::detail::field<std::string>(j, "gate", "");
        GateKind k;
        if (!parse_gate_kind(g, k) || !is_fault_gate(k)) throw ParseError("unknown fault gate '" + g + "'", 0, "/gate");
        f.gate = k;
    }
    f.segment = bloq::detail::field<std::size_t>(j, "segment", "");
    f.qubits = bloq::detail::optional_field<std::vector<unsigned>>(j, "qubits", "", {});
    f.position = bloq::detail::optional_field<std::size_t>(j, "position", "", 0);
    f.seed = bloq::detail::optional_field<std::uint64_t>(j, "seed", "", 0);
    return f;
}

}  // namespace bloq::faults
