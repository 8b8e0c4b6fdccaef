#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bloq/errors.hpp"

namespace bloq {

enum class GateKind { X, Y, Z, H, S, Sdg, Rz, CNOT, CPhase, MCZ };

inline std::string_view to_string(GateKind k) {
    switch (k) {
        case GateKind::X: return "x";
        case GateKind::Y: return "y";
        case GateKind::Z: return "z";
        case GateKind::H: return "h";
        case GateKind::S: return "s";
        case GateKind::Sdg: return "sdg";
        case GateKind::Rz: return "rz";
        case GateKind::CNOT: return "cnot";
        case GateKind::CPhase: return "cphase";
        case GateKind::MCZ: return "mcz";
    }
    return "?";
}

inline bool parse_gate_kind(std::string_view s, GateKind& out) {
    static constexpr GateKind all[] = {GateKind::X,   GateKind::Y,    GateKind::Z,
                                       GateKind::H,   GateKind::S,    GateKind::Sdg,
                                       GateKind::Rz,  GateKind::CNOT, GateKind::CPhase,
                                       GateKind::MCZ};
    for (GateKind k : all) {
        if (to_string(k) == s) {
            out = k;
            return true;
        }
    }
    return false;
}

/// A gate application. Controlled kinds keep their control qubits in
/// `controls` and the acted-on qubit in `targets`. Rz is diag(1, e^{i angle});
/// CPhase applies e^{i angle} to |11>.
struct Gate {
    GateKind kind = GateKind::X;
    std::vector<unsigned> targets;
    std::vector<unsigned> controls;
    double angle = 0.0;

    static Gate single(GateKind k, unsigned q) { return {k, {q}, {}, 0.0}; }
    static Gate rz(unsigned q, double angle) { return {GateKind::Rz, {q}, {}, angle}; }
    static Gate cnot(unsigned control, unsigned target) {
        return {GateKind::CNOT, {target}, {control}, 0.0};
    }
    static Gate cphase(unsigned control, unsigned target, double angle) {
        return {GateKind::CPhase, {target}, {control}, angle};
    }
    static Gate mcz(std::vector<unsigned> controls, unsigned target) {
        return {GateKind::MCZ, {target}, std::move(controls), 0.0};
    }

    bool has_angle() const { return kind == GateKind::Rz || kind == GateKind::CPhase; }

    /// Controls followed by targets.
    std::vector<unsigned> qubits() const {
        std::vector<unsigned> qs = controls;
        qs.insert(qs.end(), targets.begin(), targets.end());
        return qs;
    }

    std::size_t arity() const { return controls.size() + targets.size(); }

    Gate adjoint() const {
        Gate g = *this;
        if (kind == GateKind::S) g.kind = GateKind::Sdg;
        else if (kind == GateKind::Sdg) g.kind = GateKind::S;
        else if (has_angle()) g.angle = -angle;
        return g;
    }

    friend bool operator==(const Gate&, const Gate&) = default;
};

/// Throws ValidationError if the gate's qubits are out of range, repeated, or
/// the wrong count for its kind.
inline void validate_gate(const Gate& g, unsigned n) {
    const std::string name(to_string(g.kind));
    if (g.targets.size() != 1) throw ValidationError(name + " gate needs exactly one target");
    switch (g.kind) {
        case GateKind::CNOT:
        case GateKind::CPhase:
            if (g.controls.size() != 1) throw ValidationError(name + " gate needs exactly one control");
            break;
        case GateKind::MCZ:
            if (g.controls.empty()) throw ValidationError("mcz gate needs at least one control");
            break;
        default:
            if (!g.controls.empty()) throw ValidationError(name + " gate takes no controls");
    }
    auto qs = g.qubits();
    for (unsigned q : qs)
        if (q >= n) throw ValidationError(name + " gate qubit " + std::to_string(q) + " out of range");
    std::sort(qs.begin(), qs.end());
    if (std::adjacent_find(qs.begin(), qs.end()) != qs.end())
        throw ValidationError(name + " gate qubits are not distinct");
    if (!std::isfinite(g.angle)) throw ValidationError(name + " gate angle is not finite");
}

/// Adjoint of a gate sequence: reversed order, each gate inverted.
inline std::vector<Gate> adjoint_sequence(std::span<const Gate> gates) {
    std::vector<Gate> out;
    out.reserve(gates.size());
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) out.push_back(it->adjoint());
    return out;
}

enum class ProgramKind { QFT, Grover, Custom };

inline std::string_view to_string(ProgramKind k) {
    switch (k) {
        case ProgramKind::QFT: return "qft";
        case ProgramKind::Grover: return "grover";
        case ProgramKind::Custom: return "custom";
    }
    return "?";
}

/// Algorithm identity plus its input bitstring (the marked item for Grover).
struct ProgramSpec {
    ProgramKind kind = ProgramKind::Custom;
    unsigned n = 0;
    std::string input;

    /// Bit j_q of the input; qubit 0 is the leftmost character.
    int bit(unsigned q) const { return input.at(q) == '1' ? 1 : 0; }

    void validate() const {
        if (input.size() != n)
            throw ValidationError("input bitstring length " + std::to_string(input.size()) +
                                  " does not match qubit count " + std::to_string(n));
        if (input.find_first_not_of("01") != std::string::npos)
            throw ValidationError("input must be a bitstring of 0/1 characters");
    }

    friend bool operator==(const ProgramSpec&, const ProgramSpec&) = default;
};

inline std::string to_bitstring(std::size_t value, unsigned n) {
    std::string s(n, '0');
    for (unsigned q = 0; q < n; ++q)
        if (value >> (n - 1 - q) & 1U) s[q] = '1';
    return s;
}

struct SegmentRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
    friend bool operator==(const SegmentRange&, const SegmentRange&) = default;
};

/// Gate list split into a preamble (state preparation) followed by K >= 1
/// contiguous segments that together cover every gate.
class Circuit {
public:
    Circuit(unsigned n, ProgramSpec program, std::vector<Gate> preamble,
            const std::vector<std::vector<Gate>>& segments)
        : n_(n), program_(std::move(program)), gates_(std::move(preamble)) {
        preamble_size_ = gates_.size();
        for (const auto& seg : segments) {
            SegmentRange r{gates_.size(), gates_.size() + seg.size()};
            gates_.insert(gates_.end(), seg.begin(), seg.end());
            segments_.push_back(r);
        }
        validate();
    }

    /// Flat form; `segments` must be disjoint, ordered, and cover
    /// [preamble_size, gates.size()).
    Circuit(unsigned n, ProgramSpec program, std::vector<Gate> gates, std::size_t preamble_size,
            std::vector<SegmentRange> segments)
        : n_(n),
          program_(std::move(program)),
          gates_(std::move(gates)),
          preamble_size_(preamble_size),
          segments_(std::move(segments)) {
        validate();
    }

    unsigned num_qubits() const { return n_; }
    const ProgramSpec& program() const { return program_; }
    std::span<const Gate> gates() const { return gates_; }
    std::size_t num_segments() const { return segments_.size(); }
    const std::vector<SegmentRange>& segment_ranges() const { return segments_; }

    std::span<const Gate> preamble() const { return std::span(gates_).first(preamble_size_); }

    std::span<const Gate> segment(std::size_t k) const {
        check_segment(k);
        const auto& r = segments_[k];
        return std::span(gates_).subspan(r.begin, r.size());
    }

    std::vector<std::vector<Gate>> segment_lists() const {
        std::vector<std::vector<Gate>> out;
        for (std::size_t k = 0; k < segments_.size(); ++k) {
            auto s = segment(k);
            out.emplace_back(s.begin(), s.end());
        }
        return out;
    }

    void check_segment(std::size_t k) const {
        if (k >= segments_.size())
            throw IndexError("segment " + std::to_string(k) + " out of range (K = " +
                             std::to_string(segments_.size()) + ")");
    }

    friend bool operator==(const Circuit&, const Circuit&) = default;

private:
    void validate() const {
        if (n_ < 1) throw ValidationError("circuit needs at least one qubit");
        if (program_.n != n_)
            throw ValidationError("program qubit count does not match circuit");
        program_.validate();
        if (segments_.empty()) throw ValidationError("circuit needs at least one segment");
        if (preamble_size_ > gates_.size()) throw ValidationError("preamble exceeds gate list");
        std::size_t cursor = preamble_size_;
        for (const auto& r : segments_) {
            if (r.begin != cursor || r.end < r.begin)
                throw ValidationError("segment ranges overlap, leave gaps, or are out of order");
            cursor = r.end;
        }
        if (cursor != gates_.size()) throw ValidationError("segments do not cover every gate");
        for (const auto& g : gates_) validate_gate(g, n_);
    }

    unsigned n_;
    ProgramSpec program_;
    std::vector<Gate> gates_;
    std::size_t preamble_size_ = 0;
    std::vector<SegmentRange> segments_;
};

/// Number of Grover iterations, floor(pi/4 * sqrt(2^n)).
inline unsigned grover_iteration_count(unsigned n) {
    if (n < 2) throw ValidationError("grover needs at least 2 qubits");
    return static_cast<unsigned>(
        std::floor(std::numbers::pi / 4.0 * std::sqrt(std::ldexp(1.0, static_cast<int>(n)))));
}

/// QFT without the final swap network: segment k is H on qubit k followed by
/// controlled phases from each less significant qubit m > k. The input is
/// prepared by X gates in the preamble.
inline Circuit build_qft(unsigned n, const std::string& input) {
    if (n < 2 || n > 10) throw ValidationError("qft qubit count must be in [2, 10]");
    ProgramSpec spec{ProgramKind::QFT, n, input};
    spec.validate();
    std::vector<Gate> preamble;
    for (unsigned q = 0; q < n; ++q)
        if (spec.bit(q)) preamble.push_back(Gate::single(GateKind::X, q));
    std::vector<std::vector<Gate>> segments(n);
    for (unsigned k = 0; k < n; ++k) {
        segments[k].push_back(Gate::single(GateKind::H, k));
        for (unsigned m = k + 1; m < n; ++m) {
            const double angle = 2.0 * std::numbers::pi / std::ldexp(1.0, static_cast<int>(m - k + 1));
            segments[k].push_back(Gate::cphase(m, k, angle));
        }
    }
    return Circuit(n, std::move(spec), std::move(preamble), segments);
}

/// Phase oracle for `marked` followed by the diffusion operator.
inline std::vector<Gate> grover_operator(unsigned n, const std::string& marked) {
    std::vector<unsigned> controls(n - 1);
    for (unsigned q = 0; q + 1 < n; ++q) controls[q] = q;
    std::vector<Gate> g;
    auto layer = [&](GateKind k) {
        for (unsigned q = 0; q < n; ++q) g.push_back(Gate::single(k, q));
    };
    auto zero_bits = [&] {
        for (unsigned q = 0; q < n; ++q)
            if (marked[q] == '0') g.push_back(Gate::single(GateKind::X, q));
    };
    zero_bits();
    g.push_back(Gate::mcz(controls, n - 1));
    zero_bits();
    layer(GateKind::H);
    layer(GateKind::X);
    g.push_back(Gate::mcz(controls, n - 1));
    layer(GateKind::X);
    layer(GateKind::H);
    return g;
}

/// Hadamard layer in the preamble, then one Grover operator per segment.
inline Circuit build_grover(unsigned n, const std::string& marked) {
    if (n < 2 || n > 6) throw ValidationError("grover qubit count must be in [2, 6]");
    ProgramSpec spec{ProgramKind::Grover, n, marked};
    spec.validate();
    std::vector<Gate> preamble;
    for (unsigned q = 0; q < n; ++q) preamble.push_back(Gate::single(GateKind::H, q));
    const std::vector<std::vector<Gate>> segments(grover_iteration_count(n), grover_operator(n, marked));
    return Circuit(n, std::move(spec), std::move(preamble), segments);
}

inline Circuit build_program(const ProgramSpec& spec) {
    switch (spec.kind) {
        case ProgramKind::QFT: return build_qft(spec.n, spec.input);
        case ProgramKind::Grover: return build_grover(spec.n, spec.input);
        case ProgramKind::Custom: break;
    }
    throw UnsupportedError("no generator for custom programs");
}

/// Longest chain of gates that share qubits. `qubits_of` maps an element to
/// the qubits it occupies.
template <typename Range, typename QubitsOf>
std::size_t layered_depth(const Range& ops, unsigned n, QubitsOf qubits_of) {
    std::vector<std::size_t> level(n, 0);
    std::size_t depth = 0;
    for (const auto& op : ops) {
        const auto qs = qubits_of(op);
        std::size_t l = 0;
        for (unsigned q : qs) l = std::max(l, level[q]);
        ++l;
        for (unsigned q : qs) level[q] = l;
        depth = std::max(depth, l);
    }
    return depth;
}

inline std::size_t gate_depth(std::span<const Gate> gates, unsigned n) {
    return layered_depth(gates, n, [](const Gate& g) { return g.qubits(); });
}

/// Depth of the whole circuit, preamble included.
inline std::size_t circuit_depth(const Circuit& c) { return gate_depth(c.gates(), c.num_qubits()); }

/// Depth of segment k on its own, without the preamble.
inline std::size_t segment_depth(const Circuit& c, std::size_t k) {
    return gate_depth(c.segment(k), c.num_qubits());
}

/// Preamble plus segments 0..k.
inline Circuit truncate_to_segment(const Circuit& c, std::size_t k) {
    c.check_segment(k);
    const auto& ranges = c.segment_ranges();
    std::vector<Gate> gates(c.gates().begin(), c.gates().begin() + static_cast<std::ptrdiff_t>(ranges[k].end));
    std::vector<SegmentRange> kept(ranges.begin(), ranges.begin() + static_cast<std::ptrdiff_t>(k + 1));
    return Circuit(c.num_qubits(), c.program(), std::move(gates), c.preamble().size(), std::move(kept));
}

}  // namespace bloq
