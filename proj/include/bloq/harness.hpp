#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bloq/assertions.hpp"
#include "bloq/autobloq.hpp"
#include "bloq/faults.hpp"
#include "bloq/proq.hpp"
#include "bloq/stats.hpp"

namespace bloq::eval {

using assertions::LocalizationVerdict;
using faults::FaultSpec;
using stats::ConfusionCounts;

enum class Approach { Bloq, Proq };

inline std::string_view to_string(Approach a) { return a == Approach::Bloq ? "bloq" : "proq"; }

inline Approach parse_approach(const std::string& s) {
    if (s == "bloq") return Approach::Bloq;
    if (s == "proq") return Approach::Proq;
    throw ValidationError("unknown approach '" + s + "'");
}

/// Per executed segment: positive = the segment failed, fault present = the
/// ground-truth fault sits in that segment. Unexecuted segments add nothing.
inline ConfusionCounts classify(const LocalizationVerdict& v, const std::optional<FaultSpec>& truth, std::size_t K) {
    ConfusionCounts c;
    const std::size_t executed = std::min(v.segment_failed.size(), K);
    for (std::size_t k = 0; k < executed; ++k) {
        const bool positive = v.segment_failed[k];
        const bool present = truth && truth->segment == k;
        if (positive && present) ++c.tp;
        else if (positive) ++c.fp;
        else if (present) ++c.fn;
        else ++c.tn;
    }
    return c;
}

/// A program family: every qubit count in [n_min, n_max] and either every
/// input bitstring or the listed ones.
struct ProgramRange {
    ProgramKind kind = ProgramKind::Grover;
    unsigned n_min = 2;
    unsigned n_max = 2;
    std::vector<std::string> inputs;  // empty = all 2^n
};

inline std::vector<double> default_thresholds() {
    std::vector<double> t;
    for (int i = 0; i <= 25; ++i) t.push_back(i);
    return t;
}

struct ExperimentConfig {
    std::vector<ProgramRange> programs;
    std::vector<double> thresholds = default_thresholds();
    std::size_t shots = 8192;
    std::vector<BackendConfig> backends{BackendConfig::ideal()};
    std::vector<Approach> approaches{Approach::Bloq, Approach::Proq};
    std::uint64_t root_seed = 0;
    bool controls = true;    // include the fault-free control trial per program input
    bool faults = true;      // include the enumerated fault catalog
    bool timing = true;      // false reports runtime_ms = 0, making output byte-identical
    unsigned workers = 1;

    void validate() const {
        if (programs.empty()) throw ValidationError("config needs at least one program");
        if (thresholds.empty()) throw ValidationError("config needs at least one threshold");
        if (backends.empty()) throw ValidationError("config needs at least one backend");
        if (approaches.empty()) throw ValidationError("config needs at least one approach");
        for (double t : thresholds) assertions::check_threshold(t);
        for (const auto& b : backends) b.validate();
        for (const auto& p : programs) {
            if (p.kind == ProgramKind::Custom) throw ValidationError("experiments support qft and grover only");
            if (p.n_min > p.n_max) throw ValidationError("program qubit range is empty");
            for (unsigned n = p.n_min; n <= p.n_max; ++n) {
                build_program({p.kind, n, std::string(n, '0')});
                for (const auto& in : p.inputs) ProgramSpec{p.kind, n, in}.validate();
            }
        }
        if (!controls && !faults) throw ValidationError("config disables both controls and faults");
    }
};

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    try {
        for (const auto& pj : j.at("programs")) {
            ProgramRange r;
            r.kind = parse_program_kind(pj.at("kind").get<std::string>(), "/programs/kind");
            const auto& nj = pj.at("n");
            if (nj.is_array()) {
                if (nj.size() != 2) throw ValidationError("program n range must be [min, max]");
                r.n_min = nj[0].get<unsigned>();
                r.n_max = nj[1].get<unsigned>();
            } else {
                r.n_min = r.n_max = nj.get<unsigned>();
            }
            if (pj.contains("inputs") && pj.at("inputs").is_array()) r.inputs = pj.at("inputs").get<std::vector<std::string>>();
            cfg.programs.push_back(std::move(r));
        }
        if (j.contains("thresholds")) cfg.thresholds = j.at("thresholds").get<std::vector<double>>();
        cfg.shots = j.value("shots", cfg.shots);
        if (j.contains("backends")) {
            cfg.backends.clear();
            for (const auto& bj : j.at("backends")) cfg.backends.push_back(backend_from_json(bj));
        }
        if (j.contains("approaches")) {
            cfg.approaches.clear();
            for (const auto& a : j.at("approaches")) cfg.approaches.push_back(parse_approach(a.get<std::string>()));
        }
        cfg.root_seed = j.value("root_seed", cfg.root_seed);
        cfg.controls = j.value("controls", cfg.controls);
        cfg.faults = j.value("faults", cfg.faults);
        cfg.timing = j.value("timing", cfg.timing);
        cfg.workers = j.value("workers", cfg.workers);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad experiment config: ") + e.what(), 0, "");
    }
    cfg.validate();
    return cfg;
}

/// One (trial, threshold) outcome.
struct TrialRecord {
    ProgramSpec program;
    std::optional<FaultSpec> fault;
    bool observable = false;  // the fault changes the ideal final state
    BackendConfig backend;
    Approach approach = Approach::Bloq;
    double threshold = 0.0;
    std::uint64_t seed = 0;
    std::size_t segments = 0;
    LocalizationVerdict verdict;
    ConfusionCounts counts;
    std::string error;  // non-empty when the trial could not run

    bool ok() const { return error.empty(); }
};

/// Unit of work: one program input, fault (or control), backend, approach.
struct TrialKey {
    ProgramSpec program;
    std::optional<FaultSpec> fault;
    std::size_t backend = 0;
    Approach approach = Approach::Bloq;

    std::string label() const {
        std::ostringstream s;
        s << bloq::to_string(program.kind) << '|' << program.n << '|' << program.input << '|' << backend << '|'
          << to_string(approach);
        if (fault) {
            s << '|' << faults::to_string(fault->category) << '|' << (fault->gate ? bloq::to_string(*fault->gate) : "")
              << '|' << fault->segment << '|' << fault->position;
            for (unsigned q : fault->qubits) s << ',' << q;
        }
        return s.str();
    }
};

inline std::uint64_t trial_seed(std::uint64_t root, const TrialKey& key) {
    return derive_seed(root, {hash_string(key.label())});
}

inline std::vector<TrialKey> enumerate_trials(const ExperimentConfig& cfg) {
    std::vector<TrialKey> keys;
    for (const auto& range : cfg.programs)
        for (unsigned n = range.n_min; n <= range.n_max; ++n) {
            const std::size_t count = std::size_t{1} << n;
            std::vector<std::string> inputs = range.inputs;
            if (inputs.empty())
                for (std::size_t v = 0; v < count; ++v) inputs.push_back(to_bitstring(v, n));
            for (const auto& in : inputs) {
                const ProgramSpec spec{range.kind, n, in};
                std::vector<std::optional<FaultSpec>> variants;
                if (cfg.controls) variants.emplace_back(std::nullopt);
                if (cfg.faults) {
                    const auto c = build_program(spec);
                    const auto seed = derive_seed(
                        cfg.root_seed, {hash_string("faults|" + std::string(bloq::to_string(spec.kind)) + "|" + in)});
                    for (auto& f : faults::enumerate_faults(c, seed)) variants.emplace_back(std::move(f));
                }
                for (const auto& v : variants)
                    for (std::size_t b = 0; b < cfg.backends.size(); ++b)
                        for (Approach a : cfg.approaches) keys.push_back({spec, v, b, a});
            }
        }
    return keys;
}

/// Runs one trial at every threshold, sampling once and reusing the samples.
inline std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, const TrialKey& key,
                                          autobloq::SchemeCache& schemes) {
    std::vector<TrialRecord> out;
    TrialRecord base;
    base.program = key.program;
    base.fault = key.fault;
    base.approach = key.approach;
    base.seed = trial_seed(cfg.root_seed, key);
    base.backend = cfg.backends[key.backend].with_seed(base.seed);
    try {
        const auto original = build_program(key.program);
        const auto circuit = key.fault ? faults::inject(original, *key.fault) : original;
        base.segments = circuit.num_segments();
        base.observable = key.fault && faults::is_observable(original, circuit);
        std::optional<assertions::BloqSession> bloq;
        std::optional<proq::ProqSession> proq;
        if (key.approach == Approach::Bloq) bloq.emplace(circuit, *schemes.get(key.program), base.backend, cfg.shots, cfg.timing);
        else proq.emplace(circuit, base.backend, cfg.shots, cfg.timing);
        for (double t : cfg.thresholds) {
            TrialRecord r = base;
            r.threshold = t;
            r.verdict = bloq ? bloq->run(t) : proq->run(t);
            r.counts = classify(r.verdict, r.fault, r.segments);
            out.push_back(std::move(r));
        }
    } catch (const std::exception& e) {
        out.clear();
        for (double t : cfg.thresholds) {
            TrialRecord r = base;
            r.threshold = t;
            r.error = e.what();
            out.push_back(std::move(r));
        }
    }
    return out;
}

/// Every trial of the matrix in enumeration order. Workers pull trials from a
/// shared counter; results are stored by trial index, so the output does not
/// depend on the worker count.
inline std::vector<TrialRecord> run_matrix(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto keys = enumerate_trials(cfg);
    std::vector<std::vector<TrialRecord>> results(keys.size());
    autobloq::SchemeCache schemes;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < keys.size(); i = next++) results[i] = run_trial(cfg, keys[i], schemes);
    };
    const unsigned workers = std::max(1U, cfg.workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    std::vector<TrialRecord> out;
    for (auto& r : results)
        for (auto& rec : r) out.push_back(std::move(rec));
    return out;
}

// ---------------------------------------------------------------------------
// Flat result rows (the CSV form). Segment indices are 1-based here.

struct ResultRow {
    std::string program;
    unsigned n = 0;
    std::string input;
    std::string approach;
    std::string backend;
    double threshold = 0.0;
    std::string fault_category = "none";
    std::string fault_type;
    std::optional<std::size_t> fault_segment;
    std::string verdict;  // clean | faulty | error
    std::optional<std::size_t> verdict_segment;
    std::optional<unsigned> verdict_qubit;
    ConfusionCounts counts;
    double runtime_ms = 0.0;
    std::size_t depth_executed = 0;
    std::size_t shots_used = 0;
    std::uint64_t seed = 0;

    bool has_fault() const { return fault_category != "none"; }
    bool ok() const { return verdict != "error"; }
};

inline ResultRow to_row(const TrialRecord& r) {
    ResultRow row;
    row.program = bloq::to_string(r.program.kind);
    row.n = r.program.n;
    row.input = r.program.input;
    row.approach = to_string(r.approach);
    row.backend = bloq::to_string(r.backend.mode);
    row.threshold = r.threshold;
    if (r.fault) {
        row.fault_category = faults::to_string(r.fault->category);
        row.fault_type = r.fault->gate ? bloq::to_string(*r.fault->gate) : "";
        row.fault_segment = r.fault->segment + 1;
    }
    if (!r.ok()) {
        row.verdict = "error";
    } else {
        row.verdict = r.verdict.faulty ? "faulty" : "clean";
        if (r.verdict.faulty) {
            row.verdict_segment = r.verdict.segment + 1;
            row.verdict_qubit = r.verdict.qubit;
        }
    }
    row.counts = r.counts;
    row.runtime_ms = r.verdict.runtime_ms;
    row.depth_executed = r.verdict.depth_executed;
    row.shots_used = r.verdict.shots_used;
    row.seed = r.seed;
    return row;
}

inline const char* kCsvHeader =
    "program,n,input,approach,backend,threshold,fault_category,fault_type,fault_segment,verdict,verdict_segment,"
    "verdict_qubit,tp,fp,tn,fn,runtime_ms,depth_executed,shots_used,seed";

inline std::string format_double(double v, const char* fmt = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

inline void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << r.program << ',' << r.n << ',' << r.input << ',' << r.approach << ',' << r.backend << ','
           << format_double(r.threshold) << ',' << r.fault_category << ',' << r.fault_type << ',';
        if (r.fault_segment) os << *r.fault_segment;
        os << ',' << r.verdict << ',';
        if (r.verdict_segment) os << *r.verdict_segment;
        os << ',';
        if (r.verdict_qubit) os << *r.verdict_qubit;
        os << ',' << r.counts.tp << ',' << r.counts.fp << ',' << r.counts.tn << ',' << r.counts.fn << ','
           << format_double(r.runtime_ms, "%.3f") << ',' << r.depth_executed << ',' << r.shots_used << ',' << r.seed
           << '\n';
    }
}

inline void write_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
    std::vector<ResultRow> rows;
    rows.reserve(records.size());
    for (const auto& r : records) rows.push_back(to_row(r));
    write_csv(os, rows);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line) {
    std::istringstream in(s);
    T v{};
    in >> v;
    if (in.fail() || !in.eof()) throw ParseError("bad number '" + s + "' on line " + std::to_string(line), line);
    return v;
}

}  // namespace detail

inline std::vector<ResultRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("empty results file", 0);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw ParseError("unexpected results header", 0);
    std::vector<ResultRow> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 20) throw ParseError("expected 20 fields on line " + std::to_string(lineno), lineno);
        using detail::parse_number;
        ResultRow r;
        r.program = f[0];
        r.n = parse_number<unsigned>(f[1], lineno);
        r.input = f[2];
        r.approach = f[3];
        r.backend = f[4];
        r.threshold = parse_number<double>(f[5], lineno);
        r.fault_category = f[6];
        r.fault_type = f[7];
        if (!f[8].empty()) r.fault_segment = parse_number<std::size_t>(f[8], lineno);
        r.verdict = f[9];
        if (!f[10].empty()) r.verdict_segment = parse_number<std::size_t>(f[10], lineno);
        if (!f[11].empty()) r.verdict_qubit = parse_number<unsigned>(f[11], lineno);
        r.counts = {parse_number<std::size_t>(f[12], lineno), parse_number<std::size_t>(f[13], lineno),
                    parse_number<std::size_t>(f[14], lineno), parse_number<std::size_t>(f[15], lineno)};
        r.runtime_ms = parse_number<double>(f[16], lineno);
        r.depth_executed = parse_number<std::size_t>(f[17], lineno);
        r.shots_used = parse_number<std::size_t>(f[18], lineno);
        r.seed = parse_number<std::uint64_t>(f[19], lineno);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace bloq::eval
