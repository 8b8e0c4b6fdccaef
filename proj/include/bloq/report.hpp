#pragma once

#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "bloq/harness.hpp"
#include "bloq/stats.hpp"

namespace bloq::eval {

inline double row_f1(const ResultRow& r) { return stats::f1(r.counts); }

/// F1 samples for mean-F1 statistics: one per (fault-injected trial,
/// threshold). Controls carry no positives and stay out of the means; their
/// FP/TN counts remain in the CSV.
inline std::vector<double> f1_samples(const std::vector<ResultRow>& rows,
                                      const std::function<bool(const ResultRow&)>& pick) {
    std::vector<double> out;
    for (const auto& r : rows)
        if (r.ok() && r.has_fault() && pick(r)) out.push_back(row_f1(r));
    return out;
}

struct ApproachStats {
    std::size_t count = 0;
    double mean_f1 = 0.0;
    stats::Interval ci;
};

struct GroupReport {
    std::string grouping;  // e.g. "program", "qubits", "fault_segment"
    std::string key;       // the group value
    std::string backend;
    std::map<std::string, ApproachStats> approaches;
    std::optional<stats::Comparison> bloq_vs_proq;

    /// "(Bloq)", "(Proq)" or "In-Sig".
    std::string winner() const {
        if (!bloq_vs_proq || !bloq_vs_proq->significant) return "In-Sig";
        return bloq_vs_proq->effect.a12 > 0.5 ? "(Bloq)" : "(Proq)";
    }
};

struct ReportOptions {
    double level = 0.99;
    std::size_t resamples = 10000;
    std::uint64_t seed = 0;
};

using GroupKeyFn = std::function<std::string(const ResultRow&)>;

inline std::vector<std::pair<std::string, GroupKeyFn>> default_groupings() {
    return {
        {"overall", [](const ResultRow&) { return std::string("all"); }},
        {"program", [](const ResultRow& r) { return r.program; }},
        {"qubits", [](const ResultRow& r) { return r.program + ":" + std::to_string(r.n); }},
        {"fault_segment",
         [](const ResultRow& r) { return r.program + ":" + std::to_string(r.fault_segment.value_or(0)); }},
        {"fault_category", [](const ResultRow& r) { return r.fault_category; }},
        {"fault_type", [](const ResultRow& r) { return r.fault_category + ":" + r.fault_type; }},
        {"threshold", [](const ResultRow& r) { return format_double(r.threshold); }},
    };
}

/// Mean F1, bootstrap CI, and Bloq-vs-Proq comparison for every group of every
/// grouping, per backend. Groups without fault-injected rows are omitted and
/// reported in `warnings`.
inline std::vector<GroupReport> report(const std::vector<ResultRow>& rows,
                                       const std::vector<std::pair<std::string, GroupKeyFn>>& groupings,
                                       const ReportOptions& opt, std::vector<std::string>* warnings = nullptr) {
    if (rows.empty()) throw ValidationError("report needs at least one record");
    std::vector<GroupReport> out;
    for (const auto& [name, keyfn] : groupings) {
        // group -> backend -> approach -> samples
        std::map<std::string, std::map<std::string, std::map<std::string, std::vector<double>>>> buckets;
        std::map<std::string, bool> seen;
        for (const auto& r : rows) {
            const auto key = keyfn(r);
            seen[key] = true;
            if (r.ok() && r.has_fault()) buckets[key][r.backend][r.approach].push_back(row_f1(r));
        }
        for (const auto& [key, _] : seen)
            if (!buckets.count(key) && warnings)
                warnings->push_back("grouping " + name + "=" + key + " has no fault-injected records; omitted");
        for (const auto& [key, by_backend] : buckets)
            for (const auto& [backend, by_approach] : by_backend) {
                GroupReport g;
                g.grouping = name;
                g.key = key;
                g.backend = backend;
                for (const auto& [approach, samples] : by_approach) {
                    ApproachStats s;
                    s.count = samples.size();
                    s.mean_f1 = stats::mean(samples);
                    s.ci = stats::bootstrap_ci(samples, opt.level, opt.resamples,
                                               derive_seed(opt.seed, {hash_string(name + key + backend + approach)}));
                    g.approaches[approach] = s;
                }
                auto b = by_approach.find("bloq");
                auto p = by_approach.find("proq");
                if (b != by_approach.end() && p != by_approach.end()) g.bloq_vs_proq = stats::compare(b->second, p->second);
                out.push_back(std::move(g));
            }
    }
    return out;
}

struct OrderStats {
    std::string approach;
    std::string program;
    std::string backend;
    stats::Summary runtime_ms;
    stats::Summary depth;
};

/// Runtime and executed-depth order statistics per approach x program x backend.
inline std::vector<OrderStats> runtime_depth_stats(const std::vector<ResultRow>& rows) {
    if (rows.empty()) throw ValidationError("runtime statistics need at least one record");
    std::map<std::tuple<std::string, std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>> g;
    for (const auto& r : rows) {
        if (!r.ok()) continue;
        auto& [rt, dp] = g[{r.approach, r.program, r.backend}];
        rt.push_back(r.runtime_ms);
        dp.push_back(static_cast<double>(r.depth_executed));
    }
    std::vector<OrderStats> out;
    for (const auto& [key, v] : g)
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), stats::summarize(v.first),
                       stats::summarize(v.second)});
    return out;
}

inline const char* kPoolingNote =
    "each record is classified per (trial, threshold); mean F1 pools these records across thresholds within a group";

inline void write_group_csv(std::ostream& os, const std::vector<GroupReport>& groups) {
    os << "grouping,key,backend,approach,count,mean_f1,ci_lo,ci_hi,ci_half_width,mwu_p,a12,magnitude,winner\n";
    for (const auto& g : groups)
        for (const auto& [approach, s] : g.approaches) {
            os << g.grouping << ',' << g.key << ',' << g.backend << ',' << approach << ',' << s.count << ','
               << format_double(s.mean_f1, "%.6f") << ',' << format_double(s.ci.lo, "%.6f") << ','
               << format_double(s.ci.hi, "%.6f") << ',' << format_double(s.ci.half_width(), "%.3f") << ',';
            if (g.bloq_vs_proq) {
                os << format_double(g.bloq_vs_proq->mwu.p, "%.6g") << ','
                   << format_double(g.bloq_vs_proq->effect.a12, "%.6f") << ','
                   << stats::to_string(g.bloq_vs_proq->effect.magnitude);
            } else {
                os << ",,";
            }
            os << ',' << g.winner() << '\n';
        }
}

inline void write_order_csv(std::ostream& os, const std::vector<OrderStats>& s) {
    os << "approach,program,backend,metric,count,mean,median,q1,q3,iqr\n";
    for (const auto& o : s)
        for (const auto& [metric, sum] : {std::pair{"runtime_ms", o.runtime_ms}, std::pair{"depth", o.depth}})
            os << o.approach << ',' << o.program << ',' << o.backend << ',' << metric << ',' << sum.count << ','
               << format_double(sum.mean, "%.6f") << ',' << format_double(sum.median, "%.6f") << ','
               << format_double(sum.q1, "%.6f") << ',' << format_double(sum.q3, "%.6f") << ','
               << format_double(sum.iqr, "%.6f") << '\n';
}

inline nlohmann::json report_to_json(const std::vector<GroupReport>& groups, const std::vector<OrderStats>& order,
                                     const std::vector<std::string>& warnings) {
    nlohmann::json gj = nlohmann::json::array();
    for (const auto& g : groups) {
        nlohmann::json a = nlohmann::json::object();
        for (const auto& [approach, s] : g.approaches)
            a[approach] = {{"count", s.count},
                           {"mean_f1", s.mean_f1},
                           {"ci", {s.ci.lo, s.ci.hi}},
                           {"ci_half_width", s.ci.half_width()}};
        nlohmann::json entry{{"grouping", g.grouping}, {"key", g.key}, {"backend", g.backend}, {"approaches", a},
                             {"winner", g.winner()}};
        if (g.bloq_vs_proq)
            entry["comparison"] = {{"mwu_p", g.bloq_vs_proq->mwu.p},
                                   {"a12", g.bloq_vs_proq->effect.a12},
                                   {"magnitude", stats::to_string(g.bloq_vs_proq->effect.magnitude)},
                                   {"significant", g.bloq_vs_proq->significant}};
        gj.push_back(std::move(entry));
    }
    nlohmann::json oj = nlohmann::json::array();
    for (const auto& o : order) {
        auto summary = [](const stats::Summary& s) {
            return nlohmann::json{{"count", s.count}, {"mean", s.mean}, {"median", s.median},
                                  {"q1", s.q1},       {"q3", s.q3},     {"iqr", s.iqr}};
        };
        oj.push_back({{"approach", o.approach},
                      {"program", o.program},
                      {"backend", o.backend},
                      {"runtime_ms", summary(o.runtime_ms)},
                      {"depth", summary(o.depth)}});
    }
    return {{"metadata", {{"pooling", kPoolingNote}, {"segment_indexing", "1-based"}}},
            {"groups", gj},
            {"runtime_depth", oj},
            {"warnings", warnings}};
}

}  // namespace bloq::eval
