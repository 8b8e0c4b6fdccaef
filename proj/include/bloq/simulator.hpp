#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bloq/circuit.hpp"
#include "bloq/states.hpp"

namespace bloq {

// ---------------------------------------------------------------------------
// Random streams

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for a labelled sub-stream of `root`. Streams keyed by
/// (segment, qubit, axis) stay fixed no matter which other streams were drawn.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> labels) {
    std::uint64_t h = splitmix64(root);
    for (auto l : labels) h = splitmix64(h ^ splitmix64(l + 0x632be59bd9b4e019ULL));
    return h;
}

inline std::uint64_t hash_string(std::string_view s) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Backend configuration

enum class BackendMode { Ideal, Noisy };

inline std::string_view to_string(BackendMode m) { return m == BackendMode::Ideal ? "ideal" : "noisy"; }

struct BackendConfig {
    BackendMode mode = BackendMode::Ideal;
    double p1 = 0.0;
    double p2 = 0.0;
    double p_readout = 0.0;
    std::uint64_t seed = 0;

    static BackendConfig ideal(std::uint64_t seed = 0) { return {BackendMode::Ideal, 0.0, 0.0, 0.0, seed}; }
    static BackendConfig noisy(std::uint64_t seed = 0, double p1 = 2e-4, double p2 = 7e-3,
                               double p_readout = 1e-2) {
        return {BackendMode::Noisy, p1, p2, p_readout, seed};
    }

    void validate() const {
        for (double p : {p1, p2, p_readout})
            if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("backend probabilities must lie in [0, 1]");
    }

    /// Ideal mode zeroes every noise parameter regardless of stored values.
    BackendConfig effective() const {
        validate();
        if (mode == BackendMode::Ideal) return ideal(seed);
        return *this;
    }

    BackendConfig with_seed(std::uint64_t s) const {
        BackendConfig b = *this;
        b.seed = s;
        return b;
    }

    friend bool operator==(const BackendConfig&, const BackendConfig&) = default;
};

inline nlohmann::json backend_to_json(const BackendConfig& b) {
    return {{"mode", to_string(b.mode)}, {"p1", b.p1}, {"p2", b.p2}, {"p_readout", b.p_readout}, {"seed", b.seed}};
}

/// Missing noise fields take the noisy defaults; Ideal mode ignores them.
inline BackendConfig backend_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("backend must be an object", 0, "");
    BackendConfig b = BackendConfig::noisy();
    try {
        const auto mode = j.at("mode").get<std::string>();
        if (mode == "ideal") b.mode = BackendMode::Ideal;
        else if (mode == "noisy") b.mode = BackendMode::Noisy;
        else throw ParseError("unknown backend mode '" + mode + "'", 0, "/mode");
        b.p1 = j.value("p1", b.p1);
        b.p2 = j.value("p2", b.p2);
        b.p_readout = j.value("p_readout", b.p_readout);
        b.seed = j.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad backend config: ") + e.what(), 0, "");
    }
    if (b.mode == BackendMode::Ideal) b = BackendConfig::ideal(b.seed);
    b.validate();
    return b;
}

// ---------------------------------------------------------------------------
// Gate kernels

using Mat2 = std::array<complex, 4>;  // row-major

inline Mat2 conj(const Mat2& m) { return {std::conj(m[0]), std::conj(m[1]), std::conj(m[2]), std::conj(m[3])}; }

/// The 2x2 matrix applied to the target of `g` (conditioned on the controls
/// for controlled kinds).
inline Mat2 target_matrix(const Gate& g) {
    const complex i{0.0, 1.0};
    const double r = 1.0 / std::numbers::sqrt2;
    switch (g.kind) {
        case GateKind::X:
        case GateKind::CNOT: return {0.0, 1.0, 1.0, 0.0};
        case GateKind::Y: return {0.0, -i, i, 0.0};
        case GateKind::Z:
        case GateKind::MCZ: return {1.0, 0.0, 0.0, -1.0};
        case GateKind::H: return {r, r, r, -r};
        case GateKind::S: return {1.0, 0.0, 0.0, i};
        case GateKind::Sdg: return {1.0, 0.0, 0.0, -i};
        case GateKind::Rz:
        case GateKind::CPhase: return {1.0, 0.0, 0.0, std::polar(1.0, g.angle)};
    }
    throw UnsupportedError("unsupported gate kind");
}

inline Matrix to_matrix(const Mat2& m) {
    Matrix out(2, 2);
    out << m[0], m[1], m[2], m[3];
    return out;
}

/// Applies `m` to the amplitude pairs that differ in `target_bit`, restricted
/// to indices where every bit in `ctrl_mask` is set.
inline void apply_kernel(std::span<complex> v, std::size_t target_bit, std::size_t ctrl_mask, const Mat2& m) {
    for (std::size_t idx = 0; idx < v.size(); ++idx) {
        if ((idx & target_bit) || (idx & ctrl_mask) != ctrl_mask) continue;
        const complex a = v[idx];
        const complex b = v[idx | target_bit];
        v[idx] = m[0] * a + m[1] * b;
        v[idx | target_bit] = m[2] * a + m[3] * b;
    }
}

/// Applies `g` to a flat vector; `bit_of(q)` gives the bit position of qubit q.
template <typename BitOf>
void apply_gate_bits(std::span<complex> v, const Gate& g, const Mat2& m, BitOf bit_of) {
    std::size_t ctrl = 0;
    for (unsigned c : g.controls) ctrl |= std::size_t{1} << bit_of(c);
    apply_kernel(v, std::size_t{1} << bit_of(g.targets[0]), ctrl, m);
}

inline void check_qubits(const Gate& g, unsigned n) { validate_gate(g, n); }

inline void apply_gate(StateVector& psi, const Gate& g) {
    const unsigned n = psi.num_qubits();
    check_qubits(g, n);
    apply_gate_bits(psi.amplitudes(), g, target_matrix(g), [n](unsigned q) { return n - 1 - q; });
}

inline void apply_gates(StateVector& psi, std::span<const Gate> gates) {
    for (const auto& g : gates) apply_gate(psi, g);
}

inline std::span<complex> flat(DensityMatrix& rho) {
    auto& m = rho.mutable_matrix();
    return {m.data(), static_cast<std::size_t>(m.size())};
}

/// rho -> U rho U^dagger. The column-major storage is a 2n-qubit vector whose
/// low n bits index rows and high n bits index columns, and
/// vec(U rho U^dagger) = (conj(U) ⊗ U) vec(rho).
inline void apply_unitary(DensityMatrix& rho, const Gate& g) {
    const unsigned n = rho.num_qubits();
    check_qubits(g, n);
    const Mat2 m = target_matrix(g);
    auto v = flat(rho);
    apply_gate_bits(v, g, m, [n](unsigned q) { return n - 1 - q; });
    apply_gate_bits(v, g, conj(m), [n](unsigned q) { return 2 * n - 1 - q; });
}

/// m-qubit depolarizing channel on `qubits`:
/// rho -> (1-p) rho + p/(4^m - 1) * sum over non-identity Paulis P rho P.
/// Evaluated in the equivalent closed form
/// (1 - lambda) rho + lambda (Tr_S rho ⊗ I_S / 2^m), lambda = p 4^m / (4^m - 1).
inline void depolarize(DensityMatrix& rho, const std::vector<unsigned>& qubits, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("depolarizing probability must lie in [0, 1]");
    if (p == 0.0 || qubits.empty()) return;
    const unsigned n = rho.num_qubits();
    const std::size_t m = qubits.size();
    std::size_t smask = 0;
    for (unsigned q : qubits) {
        if (q >= n) throw IndexError("depolarize qubit out of range");
        smask |= std::size_t{1} << (n - 1 - q);
    }
    const std::size_t sub = std::size_t{1} << m;
    std::vector<std::size_t> offset(sub, 0);
    for (std::size_t s = 0; s < sub; ++s)
        for (std::size_t b = 0; b < m; ++b)
            if (s >> (m - 1 - b) & 1U) offset[s] |= std::size_t{1} << (n - 1 - qubits[b]);
    const double four_m = std::ldexp(1.0, static_cast<int>(2 * m));
    const double lambda = p * four_m / (four_m - 1.0);
    const double keep = 1.0 - lambda;
    const double share = lambda / static_cast<double>(sub);
    Matrix& r = rho.mutable_matrix();
    const std::size_t dim = rho.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & smask) continue;
        for (std::size_t j = 0; j < dim; ++j) {
            if (j & smask) continue;
            complex tr{0.0};
            for (std::size_t s = 0; s < sub; ++s)
                tr += r(static_cast<Eigen::Index>(i | offset[s]), static_cast<Eigen::Index>(j | offset[s]));
            for (std::size_t s = 0; s < sub; ++s)
                for (std::size_t t = 0; t < sub; ++t) {
                    auto& e = r(static_cast<Eigen::Index>(i | offset[s]), static_cast<Eigen::Index>(j | offset[t]));
                    e = keep * e + (s == t ? share * tr : complex{0.0});
                }
        }
    }
}

/// Gate superoperator followed by depolarizing noise sized by the gate's arity.
inline void apply_noisy_gate(DensityMatrix& rho, const Gate& g, const BackendConfig& backend) {
    apply_unitary(rho, g);
    const double p = g.arity() == 1 ? backend.p1 : backend.p2;
    if (p > 0.0) depolarize(rho, g.qubits(), p);
}

inline void apply_gates(DensityMatrix& rho, std::span<const Gate> gates, const BackendConfig& backend) {
    for (const auto& g : gates) apply_noisy_gate(rho, g, backend);
}

/// Non-selective projective measurement of qubit q in the Z basis.
inline void dephase(DensityMatrix& rho, unsigned q) {
    const unsigned n = rho.num_qubits();
    if (q >= n) throw IndexError("dephase qubit out of range");
    const std::size_t bit = std::size_t{1} << (n - 1 - q);
    Matrix& r = rho.mutable_matrix();
    for (Eigen::Index j = 0; j < r.cols(); ++j)
        for (Eigen::Index i = 0; i < r.rows(); ++i)
            if ((static_cast<std::size_t>(i) ^ static_cast<std::size_t>(j)) & bit) r(i, j) = 0.0;
}

/// Projects qubit q onto `outcome` and renormalizes. Returns the outcome's
/// probability; the state is left untouched when that probability is zero.
inline double collapse(StateVector& psi, unsigned q, int outcome) {
    const unsigned n = psi.num_qubits();
    if (q >= n) throw IndexError("collapse qubit out of range");
    const std::size_t bit = std::size_t{1} << (n - 1 - q);
    auto a = psi.amplitudes();
    double prob = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (((i & bit) != 0) == (outcome == 1)) prob += std::norm(a[i]);
    if (prob <= 0.0) return 0.0;
    const double scale = 1.0 / std::sqrt(prob);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (((i & bit) != 0) == (outcome == 1)) a[i] *= scale;
        else a[i] = 0.0;
    }
    return prob;
}

inline constexpr unsigned kMaxStatevectorQubits = 12;
inline constexpr unsigned kMaxDensityQubits = 10;

/// Exact evolution of |0...0> through preamble and every segment.
inline StateVector run_statevector(const Circuit& c) {
    if (c.num_qubits() > kMaxStatevectorQubits)
        throw DimensionError("statevector simulation limited to 12 qubits");
    StateVector psi(c.num_qubits());
    apply_gates(psi, c.gates());
    return psi;
}

inline DensityMatrix initial_density(unsigned n) {
    if (n > kMaxDensityQubits) throw DimensionError("density-matrix simulation limited to 10 qubits");
    return DensityMatrix::from_state(StateVector(n));
}

inline DensityMatrix run_density(const Circuit& c, const BackendConfig& backend) {
    const auto b = backend.effective();
    DensityMatrix rho = initial_density(c.num_qubits());
    apply_gates(rho, c.gates(), b);
    return rho;
}

/// Unitary of a gate sequence on n qubits, column by column.
inline Matrix unitary_of(std::span<const Gate> gates, unsigned n) {
    const std::size_t d = std::size_t{1} << n;
    Matrix u(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t col = 0; col < d; ++col) {
        auto psi = StateVector::basis(n, col);
        apply_gates(psi, gates);
        for (std::size_t row = 0; row < d; ++row)
            u(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = psi[row];
    }
    return u;
}

// ---------------------------------------------------------------------------
// Sampling

struct ShotCounts {
    std::map<std::string, std::size_t> counts;
    std::size_t total = 0;

    std::size_t operator[](const std::string& key) const {
        auto it = counts.find(key);
        return it == counts.end() ? 0 : it->second;
    }
    double frequency(const std::string& key) const {
        return total == 0 ? 0.0 : static_cast<double>((*this)[key]) / static_cast<double>(total);
    }
};

inline std::vector<double> probabilities(const StateVector& psi) {
    std::vector<double> p(psi.dim());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(psi[i]);
    return p;
}

inline std::vector<double> probabilities(const DensityMatrix& rho) {
    std::vector<double> p(rho.dim());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::max(0.0, rho(i, i).real());
    return p;
}

/// Born-rule sampling of every qubit with independent readout flips.
inline ShotCounts sample_distribution(const std::vector<double>& probs, unsigned n, std::size_t shots,
                                      double p_readout, Rng& rng) {
    if (shots < 1) throw ValidationError("shots must be at least 1");
    if (!(p_readout >= 0.0 && p_readout <= 1.0)) throw ValidationError("readout probability must lie in [0, 1]");
    std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());
    std::bernoulli_distribution flip(p_readout);
    std::vector<std::size_t> hist(probs.size(), 0);
    for (std::size_t s = 0; s < shots; ++s) {
        std::size_t outcome = pick(rng);
        if (p_readout > 0.0)
            for (unsigned q = 0; q < n; ++q)
                if (flip(rng)) outcome ^= std::size_t{1} << (n - 1 - q);
        ++hist[outcome];
    }
    ShotCounts out;
    out.total = shots;
    for (std::size_t i = 0; i < hist.size(); ++i)
        if (hist[i]) out.counts[to_bitstring(i, n)] = hist[i];
    return out;
}

template <typename State>
ShotCounts sample_counts(const State& state, std::size_t shots, double p_readout, std::uint64_t seed) {
    Rng rng(seed);
    return sample_distribution(probabilities(state), state.num_qubits(), shots, p_readout, rng);
}

inline double zero_probability(const StateVector& psi, unsigned q) {
    const std::size_t bit = std::size_t{1} << (psi.num_qubits() - 1 - q);
    double p = 0.0;
    for (std::size_t i = 0; i < psi.dim(); ++i)
        if (!(i & bit)) p += std::norm(psi[i]);
    return p;
}

inline double zero_probability(const DensityMatrix& rho, unsigned q) {
    const std::size_t bit = std::size_t{1} << (rho.num_qubits() - 1 - q);
    double p = 0.0;
    for (std::size_t i = 0; i < rho.dim(); ++i)
        if (!(i & bit)) p += rho(i, i).real();
    return std::clamp(p, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Pauli estimation

struct PauliEstimate {
    Axis axis = Axis::Z;
    double value = 0.0;
    std::size_t shots = 0;  // 0 marks an analytic (unsampled) estimate
};

/// Gates rotating the `axis` eigenbasis onto the computational basis.
inline std::vector<Gate> basis_change(unsigned q, Axis axis) {
    switch (axis) {
        case Axis::X: return {Gate::single(GateKind::H, q)};
        case Axis::Y: return {Gate::single(GateKind::Sdg, q), Gate::single(GateKind::H, q)};
        case Axis::Z: return {};
    }
    return {};
}

inline void apply_backend_gates(StateVector& psi, std::span<const Gate> gates, const BackendConfig&) {
    apply_gates(psi, gates);
}

inline void apply_backend_gates(DensityMatrix& rho, std::span<const Gate> gates, const BackendConfig& b) {
    apply_gates(rho, gates, b);
}

/// Basis-changes a copy of `state`, then measures qubit q `shots` times with
/// readout flips. `shots == 0` returns the exact expectation (1 - 2 p_readout)<P>.
template <typename State>
PauliEstimate estimate_on_state(const State& state, unsigned q, Axis axis, std::size_t shots,
                                const BackendConfig& backend, Rng& rng) {
    if (q >= state.num_qubits()) throw IndexError("qubit " + std::to_string(q) + " out of range");
    State rotated = state;
    apply_backend_gates(rotated, basis_change(q, axis), backend);
    const double p0 = zero_probability(rotated, q);
    const double pr = backend.p_readout;
    const double p0_read = std::clamp(p0 * (1.0 - pr) + (1.0 - p0) * pr, 0.0, 1.0);
    if (shots == 0) return {axis, 2.0 * p0_read - 1.0, 0};
    std::binomial_distribution<std::size_t> draw(shots, p0_read);
    const auto n0 = static_cast<double>(draw(rng));
    const auto total = static_cast<double>(shots);
    return {axis, (n0 - (total - n0)) / total, shots};
}

/// Stream for the (segment, qubit, axis) estimate under a trial seed.
inline Rng pauli_stream(std::uint64_t seed, std::size_t segment, unsigned q, Axis axis) {
    return Rng(derive_seed(seed, {segment, q, static_cast<std::uint64_t>(axis)}));
}

/// Runs `prefix` on the backend, then estimates <axis> on qubit q.
inline PauliEstimate estimate_pauli(const Circuit& prefix, unsigned q, Axis axis, std::size_t shots,
                                    const BackendConfig& backend) {
    const auto b = backend.effective();
    if (q >= prefix.num_qubits()) throw IndexError("qubit " + std::to_string(q) + " out of range");
    Rng rng = pauli_stream(b.seed, prefix.num_segments() - 1, q, axis);
    if (b.mode == BackendMode::Ideal) return estimate_on_state(run_statevector(prefix), q, axis, shots, b, rng);
    return estimate_on_state(run_density(prefix, b), q, axis, shots, b, rng);
}

struct MeasuredBloch {
    BlochVector bloch;      // rescaled onto the unit ball
    BlochVector raw;        // before rescaling
    DensityMatrix density;  // density_from_bloch(bloch)
    std::size_t shots = 0;  // total across the three axes
};

/// Three independent Pauli estimates on a prepared state. `segment` selects the
/// random streams.
template <typename State>
MeasuredBloch measure_bloch_on_state(const State& state, unsigned q, std::size_t shots,
                                     const BackendConfig& backend, std::size_t segment) {
    BlochVector raw;
    for (Axis a : kAxes) {
        Rng rng = pauli_stream(backend.seed, segment, q, a);
        raw[a] = estimate_on_state(state, q, a, shots, backend, rng).value;
    }
    const BlochVector b = raw.clamped();
    return {b, raw, density_from_bloch(b), 3 * shots};
}

inline MeasuredBloch measured_bloch(const Circuit& prefix, unsigned q, std::size_t shots,
                                    const BackendConfig& backend) {
    const auto b = backend.effective();
    if (q >= prefix.num_qubits()) throw IndexError("qubit " + std::to_string(q) + " out of range");
    const std::size_t seg = prefix.num_segments() - 1;
    if (b.mode == BackendMode::Ideal) return measure_bloch_on_state(run_statevector(prefix), q, shots, b, seg);
    return measure_bloch_on_state(run_density(prefix, b), q, shots, b, seg);
}

}  // namespace bloq
