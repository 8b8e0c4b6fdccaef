#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bloq/circuit_json.hpp"
#include "bloq/simulator.hpp"

namespace bloq::autobloq {

/// Qubits asserted after segment k: the segment's own qubit for QFT, every
/// qubit (ascending) otherwise.
inline std::vector<unsigned> planned_qubits(const ProgramSpec& p, std::size_t k) {
    if (p.kind == ProgramKind::QFT) return {static_cast<unsigned>(k)};
    std::vector<unsigned> qs(p.n);
    for (unsigned q = 0; q < p.n; ++q) qs[q] = q;
    return qs;
}

/// Phase of qubit q after QFT segment k = q: 2 pi * 0.j_q j_{q+1} ... j_{n-1},
/// evaluated as an integer numerator over 2^(n-q).
inline double qft_theta(unsigned q, std::size_t k, const std::string& j) {
    const auto n = static_cast<unsigned>(j.size());
    if (k != q) throw ValidationError("QFT schemes exist only for k = q");
    if (q >= n) throw IndexError("qubit out of range");
    std::uint64_t num = 0;
    for (unsigned i = q; i < n; ++i) num = 2 * num + (j[i] == '1');
    const std::uint64_t den = std::uint64_t{1} << (n - q);
    return 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den);
}

inline BlochVector qft_scheme(unsigned q, std::size_t k, const std::string& j) {
    const double t = qft_theta(q, k, j);
    return {std::cos(t), std::sin(t), 0.0};
}

/// Grover rotation angles for a single marked item: sin(theta) = 2 sqrt(N-1)/N
/// and phi_k = (2k+1) theta / 2.
struct GroverAngles {
    unsigned n = 0;
    double theta = 0.0;

    explicit GroverAngles(unsigned qubits) : n(qubits) {
        if (n < 2) throw ValidationError("grover needs at least 2 qubits");
        theta = 2.0 * std::asin(1.0 / std::sqrt(N()));
    }

    double N() const { return std::ldexp(1.0, static_cast<int>(n)); }
    double phi(unsigned k) const { return (2.0 * k + 1.0) * theta / 2.0; }
};

/// Expected Bloch vector of qubit q after k Grover iterations (k = 0 is the
/// uniform superposition).
inline BlochVector grover_scheme(unsigned q, unsigned k, const std::string& j, unsigned n) {
    if (j.size() != n) throw ValidationError("marked bitstring length does not match n");
    if (q >= n) throw IndexError("qubit out of range");
    if (k > grover_iteration_count(n)) throw IndexError("iteration index beyond the segment count");
    const GroverAngles a(n);
    const double N = a.N();
    const double phi = a.phi(k);
    const double c2 = std::cos(phi) * std::cos(phi);
    const double s2 = std::sin(phi) * std::sin(phi);
    const double x = c2 * (N - 2.0) / (N - 1.0) + std::sin(2.0 * phi) / std::sqrt(N - 1.0);
    const double z = (s2 - c2 / (N - 1.0)) * (j[q] == '1' ? -1.0 : 1.0);
    return {x, 0.0, z};
}

/// Bloch vector of qubit q after segment k by exact simulation and partial trace.
inline BlochVector numeric_scheme(const Circuit& c, unsigned q, std::size_t k) {
    if (q >= c.num_qubits()) throw IndexError("qubit out of range");
    return bloch_of(partial_trace(run_statevector(truncate_to_segment(c, k)), q));
}

/// Expected Bloch vectors keyed by (qubit, 0-based segment).
class AssertionScheme {
public:
    using Key = std::pair<unsigned, std::size_t>;

    AssertionScheme() = default;
    AssertionScheme(ProgramSpec program, std::size_t segments)
        : program_(std::move(program)), segments_(segments) {}

    const ProgramSpec& program() const { return program_; }
    std::size_t num_segments() const { return segments_; }
    const std::map<Key, BlochVector>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    void set(unsigned q, std::size_t k, const BlochVector& b) {
        if (b.norm() > 1.0 + 1e-9) throw InvalidStateError("scheme vector longer than 1");
        entries_[{q, k}] = b;
    }

    bool contains(unsigned q, std::size_t k) const { return entries_.count({q, k}) != 0; }

    const BlochVector& at(unsigned q, std::size_t k) const {
        auto it = entries_.find({q, k});
        if (it == entries_.end())
            throw IndexError("no scheme entry for qubit " + std::to_string(q) + ", segment " + std::to_string(k));
        return it->second;
    }

    /// Throws unless every planned (q, k) of a circuit with this program has an entry.
    void check_covers(const Circuit& c) const {
        for (std::size_t k = 0; k < c.num_segments(); ++k)
            for (unsigned q : planned_qubits(c.program(), k))
                if (!contains(q, k)) at(q, k);
    }

private:
    ProgramSpec program_;
    std::size_t segments_ = 0;
    std::map<Key, BlochVector> entries_;
};

/// Closed-form scheme for every planned (q, k) of a QFT or Grover program.
inline AssertionScheme build_scheme(const ProgramSpec& p) {
    p.validate();
    switch (p.kind) {
        case ProgramKind::QFT: {
            AssertionScheme s(p, p.n);
            for (unsigned k = 0; k < p.n; ++k) s.set(k, k, qft_scheme(k, k, p.input));
            return s;
        }
        case ProgramKind::Grover: {
            const unsigned K = grover_iteration_count(p.n);
            AssertionScheme s(p, K);
            for (unsigned k = 0; k < K; ++k)
                for (unsigned q = 0; q < p.n; ++q) s.set(q, k, grover_scheme(q, k + 1, p.input, p.n));
            return s;
        }
        case ProgramKind::Custom: break;
    }
    throw UnsupportedError("no closed-form scheme for custom programs");
}

/// Scheme computed by simulation for every planned (q, k) of `c`; works for
/// any circuit, including custom ones.
inline AssertionScheme build_numeric_scheme(const Circuit& c) {
    AssertionScheme s(c.program(), c.num_segments());
    StateVector psi(c.num_qubits());
    apply_gates(psi, c.preamble());
    for (std::size_t k = 0; k < c.num_segments(); ++k) {
        apply_gates(psi, c.segment(k));
        for (unsigned q : planned_qubits(c.program(), k)) s.set(q, k, bloch_of(partial_trace(psi, q)).clamped());
    }
    return s;
}

/// Scheme for any circuit: closed form when available, simulation otherwise.
inline AssertionScheme scheme_for(const Circuit& c) {
    if (c.program().kind == ProgramKind::Custom) return build_numeric_scheme(c);
    return build_scheme(c.program());
}

/// Thread-safe memo of closed-form schemes per program.
class SchemeCache {
public:
    std::shared_ptr<const AssertionScheme> get(const ProgramSpec& p) {
        const auto key = std::make_tuple(static_cast<int>(p.kind), p.n, p.input);
        std::lock_guard lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        auto s = std::make_shared<const AssertionScheme>(build_scheme(p));
        cache_.emplace(key, s);
        return s;
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return cache_.size();
    }

private:
    mutable std::mutex mutex_;
    std::map<std::tuple<int, unsigned, std::string>, std::shared_ptr<const AssertionScheme>> cache_;
};

inline nlohmann::json scheme_to_json(const AssertionScheme& s) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [key, b] : s.entries())
        entries.push_back({{"q", key.first}, {"k", key.second}, {"bloch", {b.x, b.y, b.z}}});
    nlohmann::json program = program_to_json(s.program());
    program["n"] = s.program().n;
    return {{"program", program}, {"segments", s.num_segments()}, {"entries", entries}};
}

inline AssertionScheme scheme_from_json(const nlohmann::json& j) {
    const auto pj = detail::field<nlohmann::json>(j, "program", "");
    const auto n = detail::field<unsigned>(pj, "n", "/program");
    const auto program = program_from_json(pj, n, "/program");
    AssertionScheme s(program, detail::optional_field<std::size_t>(j, "segments", "", 0));
    const auto entries = detail::field<nlohmann::json>(j, "entries", "");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string path = "/entries/" + std::to_string(i);
        const auto b = detail::field<std::vector<double>>(entries[i], "bloch", path);
        if (b.size() != 3) throw ParseError("bloch must have three components", 0, path + "/bloch");
        s.set(detail::field<unsigned>(entries[i], "q", path), detail::field<std::size_t>(entries[i], "k", path),
              {b[0], b[1], b[2]});
    }
    return s;
}

}  // namespace bloq::autobloq
