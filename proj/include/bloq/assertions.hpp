#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bloq/autobloq.hpp"
#include "bloq/simulator.hpp"

namespace bloq::assertions {

/// Slack on the threshold comparison so values that meet the bound exactly
/// (up to rounding in the fidelity computation) pass.
inline constexpr double kAssessTolerance = 1e-9;

inline void check_threshold(double t) {
    if (!(t >= 0.0 && t <= 100.0)) throw ValidationError("threshold must lie in [0, 100]");
}

/// FAIL iff `statistic` < 1 - t/100.
inline bool passes(double statistic, double t) {
    check_threshold(t);
    return !(statistic < 1.0 - t / 100.0 - kAssessTolerance);
}

struct AssertionOutcome {
    bool pass = true;
    double fidelity = 1.0;  // Bloq fidelity, or Proq expected-outcome frequency
    unsigned q = 0;
    std::size_t k = 0;
};

inline AssertionOutcome bloq_single_assess(const DensityMatrix& measured, const DensityMatrix& expected, double t,
                                           unsigned q = 0, std::size_t k = 0) {
    if (measured.dim() != 2 || expected.dim() != 2)
        throw DimensionError("single-qubit assessment needs 2x2 density matrices");
    measured.validate(1e-9);
    expected.validate(1e-9);
    const double f = fidelity(measured, expected);
    return {passes(f, t), f, q, k};
}

/// PASS iff every single-qubit assessment of the segment passes.
inline bool bloq_segment_assess(const std::vector<AssertionOutcome>& outcomes) {
    if (outcomes.empty()) throw ValidationError("segment assessment needs at least one outcome");
    for (const auto& o : outcomes)
        if (o.k != outcomes.front().k) throw ValidationError("outcomes span several segments");
    for (const auto& o : outcomes)
        if (!o.pass) return false;
    return true;
}

/// Result of one localization run. Indices are 0-based; outputs convert.
struct LocalizationVerdict {
    bool faulty = false;
    std::size_t segment = 0;
    unsigned qubit = 0;
    std::size_t segments_executed = 0;
    std::size_t shots_used = 0;
    std::size_t depth_executed = 0;
    double runtime_ms = 0.0;
    std::vector<bool> segment_failed;  // one entry per executed segment
    std::vector<AssertionOutcome> assertions;
};

inline nlohmann::json verdict_to_json(const LocalizationVerdict& v) {
    nlohmann::json assertions = nlohmann::json::array();
    for (const auto& a : v.assertions)
        assertions.push_back(
            {{"q", a.q}, {"k", a.k + 1}, {"fidelity", a.fidelity}, {"verdict", a.pass ? "pass" : "fail"}});
    nlohmann::json j{{"result", v.faulty ? "faulty" : "clean"},
                     {"segment", nullptr},
                     {"qubit", nullptr},
                     {"segments_executed", v.segments_executed},
                     {"shots", v.shots_used},
                     {"depth_executed", v.depth_executed},
                     {"assertions", assertions}};
    if (v.faulty) {
        j["segment"] = v.segment + 1;
        j["qubit"] = v.qubit;
    }
    return j;
}

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

/// Per-qubit layer counts of a growing gate list, for depth queries.
class DepthTracker {
public:
    explicit DepthTracker(unsigned n) : level_(n, 0) {}

    void add(const Gate& g) { add_qubits(g.qubits()); }

    void add_qubits(const std::vector<unsigned>& qs) {
        std::size_t l = 0;
        for (unsigned q : qs) l = std::max(l, level_[q]);
        ++l;
        for (unsigned q : qs) level_[q] = l;
        depth_ = std::max(depth_, l);
    }

    std::size_t depth() const { return depth_; }
    std::size_t level(unsigned q) const { return level_[q]; }

private:
    std::vector<std::size_t> level_;
    std::size_t depth_ = 0;
};

}  // namespace detail

/// Bloq localization of one circuit. Measurements are taken lazily, at most
/// once per (segment, qubit), and reused by every `run(t)` call, so a
/// threshold sweep sees one consistent set of samples.
class BloqSession {
public:
    /// `shots == 0` selects analytic mode (exact expectations, no sampling).
    BloqSession(Circuit circuit, autobloq::AssertionScheme scheme, const BackendConfig& backend, std::size_t shots,
                bool timing = true)
        : circuit_(std::move(circuit)),
          scheme_(std::move(scheme)),
          backend_(backend.effective()),
          shots_(shots),
          timing_(timing),
          depth_(circuit_.num_qubits()) {
        scheme_.check_covers(circuit_);
        if (backend_.mode == BackendMode::Ideal) state_ = StateVector(circuit_.num_qubits());
        else state_ = initial_density(circuit_.num_qubits());
        const auto start = std::chrono::steady_clock::now();
        advance(circuit_.preamble());
        preamble_ms_ = timing_ ? detail::elapsed_ms(start) : 0.0;
    }

    const Circuit& circuit() const { return circuit_; }

    struct Measurement {
        unsigned q = 0;
        BlochVector bloch;
        DensityMatrix density{Matrix::Identity(2, 2) / 2.0, DensityMatrix::Unchecked{}};
        double fidelity = 1.0;
        double runtime_ms = 0.0;
        std::size_t depth = 0;  // depth of the deepest of the three assertion circuits
    };

    /// Measurements for segment k in planned order, simulating up to k if needed.
    const std::vector<Measurement>& measurements(std::size_t k) {
        circuit_.check_segment(k);
        while (measured_.size() <= k) measure_next();
        return measured_[k];
    }

    LocalizationVerdict run(double t) {
        check_threshold(t);
        LocalizationVerdict v;
        v.runtime_ms = preamble_ms_;
        for (std::size_t k = 0; k < circuit_.num_segments(); ++k) {
            const auto& ms = measurements(k);
            ++v.segments_executed;
            v.runtime_ms += segment_ms_[k];
            bool failed = false;
            for (const auto& m : ms) {
                v.shots_used += 3 * shots_;
                v.depth_executed = std::max(v.depth_executed, m.depth);
                v.runtime_ms += m.runtime_ms;
                const bool pass = passes(m.fidelity, t);
                v.assertions.push_back({pass, m.fidelity, m.q, k});
                if (!pass) {
                    failed = true;
                    v.faulty = true;
                    v.segment = k;
                    v.qubit = m.q;
                    break;
                }
            }
            v.segment_failed.push_back(failed);
            if (failed) break;
        }
        return v;
    }

private:
    void advance(std::span<const Gate> gates) {
        for (const auto& g : gates) depth_.add(g);
        std::visit([&](auto& s) { apply_backend_gates(s, gates, backend_); }, state_);
    }

    void measure_next() {
        const std::size_t k = measured_.size();
        auto start = std::chrono::steady_clock::now();
        advance(circuit_.segment(k));
        segment_ms_.push_back(timing_ ? detail::elapsed_ms(start) : 0.0);
        std::vector<Measurement> out;
        for (unsigned q : autobloq::planned_qubits(circuit_.program(), k)) {
            start = std::chrono::steady_clock::now();
            auto mb = std::visit(
                [&](const auto& s) { return measure_bloch_on_state(s, q, shots_, backend_, k); }, state_);
            Measurement m;
            m.q = q;
            m.bloch = mb.bloch;
            m.density = mb.density;
            m.fidelity = fidelity(mb.density, density_from_bloch(scheme_.at(q, k)));
            // The Y basis change (S^dagger then H) adds two layers on q.
            m.depth = std::max(depth_.depth(), depth_.level(q) + 2);
            m.runtime_ms = timing_ ? detail::elapsed_ms(start) : 0.0;
            out.push_back(std::move(m));
        }
        measured_.push_back(std::move(out));
    }

    Circuit circuit_;
    autobloq::AssertionScheme scheme_;
    BackendConfig backend_;
    std::size_t shots_;
    bool timing_;
    detail::DepthTracker depth_;
    std::variant<StateVector, DensityMatrix> state_{StateVector(1)};
    double preamble_ms_ = 0.0;
    std::vector<double> segment_ms_;
    std::vector<std::vector<Measurement>> measured_;
};

/// One-shot Bloq localization at threshold t.
inline LocalizationVerdict run_bloq(const Circuit& c, const autobloq::AssertionScheme& scheme,
                                    const BackendConfig& backend, std::size_t shots, double t) {
    return BloqSession(c, scheme, backend, shots).run(t);
}

}  // namespace bloq::assertions
