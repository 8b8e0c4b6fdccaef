#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "bloq/assertions.hpp"

namespace bloq::proq {

using assertions::LocalizationVerdict;

/// Uncompute, measure, recompute for one segment.
struct ProqPlan {
    std::vector<Gate> uncompute;
    std::vector<unsigned> measured;
    std::string expected;  // one character per measured qubit
    std::vector<Gate> recompute;
};

/// Phase left on QFT qubit q by the controlled rotations of its segment,
/// 2 pi * 0.0 j_{q+1} ... j_{n-1}. Removing it returns the qubit to H|j_q>.
inline double qft_rotation_phase(unsigned q, const std::string& j) {
    const auto n = static_cast<unsigned>(j.size());
    std::uint64_t num = 0;
    for (unsigned i = q + 1; i < n; ++i) num = 2 * num + (j[i] == '1');
    const std::uint64_t den = std::uint64_t{1} << (n - q);
    return 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den);
}

inline ProqPlan build_proq_plan(const ProgramSpec& p, std::size_t k) {
    p.validate();
    ProqPlan plan;
    switch (p.kind) {
        case ProgramKind::QFT: {
            if (k >= p.n) throw IndexError("segment out of range");
            const auto q = static_cast<unsigned>(k);
            const double phase = qft_rotation_phase(q, p.input);
            if (phase != 0.0) plan.uncompute.push_back(Gate::rz(q, -phase));
            plan.uncompute.push_back(Gate::single(GateKind::H, q));
            plan.measured = {q};
            plan.expected = std::string(1, p.input[q]);
            break;
        }
        case ProgramKind::Grover: {
            const auto ideal = build_grover(p.n, p.input);
            ideal.check_segment(k);
            const auto prefix = truncate_to_segment(ideal, k);
            // Inverting the Hadamard preamble as well makes the expected outcome |0...0>.
            plan.uncompute = adjoint_sequence(prefix.gates());
            for (unsigned q = 0; q < p.n; ++q) plan.measured.push_back(q);
            plan.expected = std::string(p.n, '0');
            break;
        }
        case ProgramKind::Custom: throw UnsupportedError("no projective plan for custom programs");
    }
    plan.recompute = adjoint_sequence(plan.uncompute);
    return plan;
}

struct Measure {
    std::vector<unsigned> qubits;
    std::size_t reg = 0;
};

using Op = std::variant<Gate, Measure>;

/// The program with every segment followed by its uncompute, a mid-circuit
/// measurement into register k, and the recompute.
struct InstrumentedCircuit {
    unsigned n = 0;
    std::vector<Op> ops;
    std::vector<ProqPlan> plans;
};

inline InstrumentedCircuit instrument(const Circuit& c) {
    InstrumentedCircuit ic;
    ic.n = c.num_qubits();
    for (const auto& g : c.preamble()) ic.ops.emplace_back(g);
    for (std::size_t k = 0; k < c.num_segments(); ++k) {
        for (const auto& g : c.segment(k)) ic.ops.emplace_back(g);
        auto plan = build_proq_plan(c.program(), k);
        for (const auto& g : plan.uncompute) ic.ops.emplace_back(g);
        ic.ops.emplace_back(Measure{plan.measured, k});
        for (const auto& g : plan.recompute) ic.ops.emplace_back(g);
        ic.plans.push_back(std::move(plan));
    }
    return ic;
}

/// Layered depth; a measurement occupies one layer on each measured qubit.
inline std::size_t instrumented_depth(const InstrumentedCircuit& ic) {
    assertions::detail::DepthTracker d(ic.n);
    for (const auto& op : ic.ops) {
        if (const auto* g = std::get_if<Gate>(&op)) d.add(*g);
        else
            for (unsigned q : std::get<Measure>(op).qubits) d.add_qubits({q});
    }
    return d.depth();
}

/// Outcome statistics of one measurement register.
struct RegisterStats {
    std::string expected;
    std::vector<unsigned> qubits;
    double frequency = 0.0;             // fraction of shots reading exactly `expected`
    std::vector<double> bit_agreement;  // per measured qubit, fraction reading the expected bit
};

namespace detail {

inline std::size_t index_of_bits(const std::string& bits) {
    std::size_t v = 0;
    for (char c : bits) v = 2 * v + (c == '1');
    return v;
}

/// Distribution over the measured qubits (first listed = most significant).
template <typename ProbOf>
std::vector<double> marginal(std::size_t dim, unsigned n, const std::vector<unsigned>& qubits, ProbOf prob) {
    const std::size_t m = qubits.size();
    std::vector<double> out(std::size_t{1} << m, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        std::size_t o = 0;
        for (std::size_t b = 0; b < m; ++b) o = 2 * o + ((i >> (n - 1 - qubits[b])) & 1U);
        out[o] += prob(i);
    }
    return out;
}

inline void apply_readout(std::vector<double>& dist, std::size_t m, double pr) {
    if (pr == 0.0) return;
    for (std::size_t b = 0; b < m; ++b) {
        const std::size_t bit = std::size_t{1} << (m - 1 - b);
        for (std::size_t o = 0; o < dist.size(); ++o) {
            if (o & bit) continue;
            const double a = dist[o];
            const double c = dist[o | bit];
            dist[o] = (1.0 - pr) * a + pr * c;
            dist[o | bit] = (1.0 - pr) * c + pr * a;
        }
    }
}

/// Stats from an outcome distribution or histogram (weights need not be normalized).
inline RegisterStats stats_from(const std::vector<double>& weights, const ProqPlan& plan) {
    RegisterStats s;
    s.expected = plan.expected;
    s.qubits = plan.measured;
    const std::size_t m = plan.measured.size();
    double total = 0.0;
    for (double w : weights) total += w;
    const std::size_t want = index_of_bits(plan.expected);
    s.frequency = total > 0.0 ? weights[want] / total : 0.0;
    s.bit_agreement.assign(m, 0.0);
    for (std::size_t o = 0; o < weights.size(); ++o)
        for (std::size_t b = 0; b < m; ++b)
            if (((o >> (m - 1 - b)) & 1U) == ((want >> (m - 1 - b)) & 1U)) s.bit_agreement[b] += weights[o];
    for (auto& a : s.bit_agreement) a = total > 0.0 ? a / total : 0.0;
    return s;
}

/// Multinomial split of `count` over `probs` by sequential binomials.
inline std::vector<std::size_t> multinomial(std::size_t count, const std::vector<double>& probs, Rng& rng) {
    std::vector<std::size_t> out(probs.size(), 0);
    double rest = 1.0;
    std::size_t left = count;
    for (std::size_t i = 0; i < probs.size() && left > 0; ++i) {
        if (i + 1 == probs.size() || rest <= 0.0) {
            out[i] = left;
            break;
        }
        const double p = std::clamp(probs[i] / rest, 0.0, 1.0);
        std::binomial_distribution<std::size_t> d(left, p);
        out[i] = d(rng);
        left -= out[i];
        rest -= probs[i];
    }
    return out;
}

inline Rng register_stream(std::uint64_t seed, std::size_t reg) {
    return Rng(derive_seed(seed, {0x70726f71ULL, reg}));
}

/// Density-matrix execution with non-selective mid-circuit measurements.
inline std::vector<RegisterStats> execute_density(const InstrumentedCircuit& ic, const BackendConfig& b,
                                                  std::size_t shots) {
    DensityMatrix rho = initial_density(ic.n);
    std::vector<RegisterStats> out(ic.plans.size());
    for (const auto& op : ic.ops) {
        if (const auto* g = std::get_if<Gate>(&op)) {
            apply_noisy_gate(rho, *g, b);
            continue;
        }
        const auto& meas = std::get<Measure>(op);
        auto dist = marginal(rho.dim(), ic.n, meas.qubits, [&](std::size_t i) { return std::max(0.0, rho(i, i).real()); });
        apply_readout(dist, meas.qubits.size(), b.p_readout);
        const auto& plan = ic.plans[meas.reg];
        if (shots == 0) {
            out[meas.reg] = stats_from(dist, plan);
        } else {
            Rng rng = register_stream(b.seed, meas.reg);
            const auto counts = multinomial(shots, dist, rng);
            out[meas.reg] = stats_from(std::vector<double>(counts.begin(), counts.end()), plan);
        }
        for (unsigned q : meas.qubits) dephase(rho, q);
    }
    return out;
}

/// Ideal execution by shot-group trajectories: each measurement splits the
/// shots of every branch over its outcomes and collapses each part.
inline std::vector<RegisterStats> execute_trajectories(const InstrumentedCircuit& ic, const BackendConfig& b,
                                                       std::size_t shots) {
    std::vector<std::pair<StateVector, std::size_t>> branches;
    branches.emplace_back(StateVector(ic.n), shots);
    std::vector<RegisterStats> out(ic.plans.size());
    for (const auto& op : ic.ops) {
        if (const auto* g = std::get_if<Gate>(&op)) {
            for (auto& br : branches) apply_gate(br.first, *g);
            continue;
        }
        const auto& meas = std::get<Measure>(op);
        const std::size_t m = meas.qubits.size();
        Rng rng = register_stream(b.seed, meas.reg);
        std::vector<double> hist(std::size_t{1} << m, 0.0);
        std::vector<std::pair<StateVector, std::size_t>> next;
        for (auto& [psi, count] : branches) {
            const auto amps = psi.amplitudes();
            auto dist = marginal(psi.dim(), ic.n, meas.qubits, [&](std::size_t i) { return std::norm(amps[i]); });
            double total = 0.0;
            for (double p : dist) total += p;
            for (auto& p : dist) p /= total;
            const auto split = multinomial(count, dist, rng);
            for (std::size_t o = 0; o < split.size(); ++o) {
                if (split[o] == 0) continue;
                hist[o] += static_cast<double>(split[o]);
                StateVector collapsed = psi;
                for (std::size_t bq = 0; bq < m; ++bq)
                    collapse(collapsed, meas.qubits[bq], static_cast<int>((o >> (m - 1 - bq)) & 1U));
                next.emplace_back(std::move(collapsed), split[o]);
            }
        }
        branches = std::move(next);
        out[meas.reg] = stats_from(hist, ic.plans[meas.reg]);
    }
    return out;
}

}  // namespace detail

/// Runs the instrumented circuit once. `shots == 0` gives exact statistics.
inline std::vector<RegisterStats> execute_proq(const InstrumentedCircuit& ic, const BackendConfig& backend,
                                               std::size_t shots) {
    const auto b = backend.effective();
    if (b.mode == BackendMode::Ideal && shots > 0) return detail::execute_trajectories(ic, b, shots);
    return detail::execute_density(ic, b, shots);
}

/// Proq localization. The full instrumented circuit runs once, on first use;
/// every threshold is assessed against the same register statistics.
class ProqSession {
public:
    ProqSession(const Circuit& c, const BackendConfig& backend, std::size_t shots, bool timing = true)
        : ic_(instrument(c)), backend_(backend.effective()), shots_(shots), timing_(timing) {
        depth_ = instrumented_depth(ic_);
    }

    const InstrumentedCircuit& instrumented() const { return ic_; }
    std::size_t depth() const { return depth_; }

    const std::vector<RegisterStats>& stats() {
        if (!stats_) {
            const auto start = std::chrono::steady_clock::now();
            stats_ = execute_proq(ic_, backend_, shots_);
            runtime_ms_ = timing_ ? assertions::detail::elapsed_ms(start) : 0.0;
        }
        return *stats_;
    }

    LocalizationVerdict run(double t) {
        assertions::check_threshold(t);
        const auto& st = stats();
        LocalizationVerdict v;
        v.segments_executed = st.size();
        v.shots_used = shots_;
        v.depth_executed = depth_;
        v.runtime_ms = runtime_ms_;
        for (std::size_t k = 0; k < st.size(); ++k) {
            const bool pass = assertions::passes(st[k].frequency, t);
            const unsigned q = blamed_qubit(st[k], t);
            v.assertions.push_back({pass, st[k].frequency, q, k});
            v.segment_failed.push_back(!pass);
            if (!pass && !v.faulty) {
                v.faulty = true;
                v.segment = k;
                v.qubit = q;
            }
        }
        return v;
    }

private:
    /// First measured qubit whose agreement fails the threshold, else the least
    /// agreeing one (lowest index on ties).
    static unsigned blamed_qubit(const RegisterStats& s, double t) {
        for (std::size_t b = 0; b < s.qubits.size(); ++b)
            if (!assertions::passes(s.bit_agreement[b], t)) return s.qubits[b];
        std::size_t worst = 0;
        for (std::size_t b = 1; b < s.qubits.size(); ++b)
            if (s.bit_agreement[b] < s.bit_agreement[worst]) worst = b;
        return s.qubits[worst];
    }

    InstrumentedCircuit ic_;
    BackendConfig backend_;
    std::size_t shots_;
    bool timing_;
    std::size_t depth_ = 0;
    double runtime_ms_ = 0.0;
    std::optional<std::vector<RegisterStats>> stats_;
};

inline LocalizationVerdict run_proq(const Circuit& c, const BackendConfig& backend, std::size_t shots, double t) {
    return ProqSession(c, backend, shots).run(t);
}

}  // namespace bloq::proq
