#include <gtest/gtest.h>

#include <sstream>

#include "../support/generators.hpp"

using namespace bloq;
using stats::ConfusionCounts;

namespace {

assertions::LocalizationVerdict random_verdict(gen::Rng& rng, std::size_t K) {
    assertions::LocalizationVerdict v;
    v.segments_executed = 1 + gen::index(rng, K);
    for (std::size_t k = 0; k < v.segments_executed; ++k) v.segment_failed.push_back(gen::index(rng, 2) == 1);
    for (std::size_t k = 0; k < v.segments_executed; ++k)
        if (v.segment_failed[k]) {
            v.faulty = true;
            v.segment = k;
            break;
        }
    return v;
}

eval::ExperimentConfig small_config() {
    eval::ExperimentConfig cfg;
    cfg.programs = {{ProgramKind::QFT, 2, 2, {"01"}}, {ProgramKind::Grover, 2, 2, {"10"}}};
    cfg.thresholds = {0, 5, 10};
    cfg.shots = 256;
    cfg.backends = {BackendConfig::ideal(), BackendConfig::noisy()};
    cfg.root_seed = 42;
    cfg.timing = false;
    return cfg;
}

}  // namespace

TEST(HarnessProperty, ClassificationCoversExecutedSegments) {
    gen::Rng rng(701);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t K = 1 + gen::index(rng, 6);
        const auto v = random_verdict(rng, K);
        std::optional<faults::FaultSpec> truth;
        if (gen::index(rng, 3))
            truth = faults::FaultSpec{faults::FaultCategory::Add, GateKind::X, gen::index(rng, K), {0}, 0, 0};
        const auto c = eval::classify(v, truth, K);
        EXPECT_EQ(c.total(), v.segments_executed);
        EXPECT_LE(c.tp + c.fn, 1U);
        if (!truth) {
            EXPECT_EQ(c.tp + c.fn, 0U);
        }
    }
}

TEST(HarnessProperty, F1MonotoneInTruePositives) {
    gen::Rng rng(702);
    for (int i = 0; i < 1000; ++i) {
        ConfusionCounts c{gen::index(rng, 10), gen::index(rng, 10), gen::index(rng, 10), gen::index(rng, 10)};
        const double f = stats::f1(c);
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0);
        auto more = c;
        ++more.tp;
        EXPECT_GE(stats::f1(more), f);
        auto fewer_fp = c;
        if (fewer_fp.fp > 0) {
            --fewer_fp.fp;
            EXPECT_GE(stats::f1(fewer_fp), f);
        }
    }
}

TEST(HarnessProperty, A12Complementary) {
    gen::Rng rng(703);
    for (int i = 0; i < 300; ++i) {
        const auto a = gen::sample(1 + gen::index(rng, 30), rng);
        const auto b = gen::sample(1 + gen::index(rng, 30), rng);
        const auto ab = stats::vargha_delaney(a, b);
        const auto ba = stats::vargha_delaney(b, a);
        EXPECT_NEAR(ab.a12 + ba.a12, 1.0, 1e-12);
        EXPECT_GE(ab.a12, 0.0);
        EXPECT_LE(ab.a12, 1.0);
        EXPECT_EQ(ab.magnitude, ba.magnitude);
    }
}

TEST(HarnessProperty, MannWhitneySymmetric) {
    gen::Rng rng(704);
    for (int i = 0; i < 200; ++i) {
        const auto a = gen::sample(1 + gen::index(rng, 25), rng);
        const auto b = gen::sample(1 + gen::index(rng, 25), rng);
        const auto ab = stats::mann_whitney_u(a, b);
        const auto ba = stats::mann_whitney_u(b, a);
        EXPECT_NEAR(ab.p, ba.p, 1e-12);
        EXPECT_NEAR(ab.u + ba.u, static_cast<double>(a.size() * b.size()), 1e-9);
        EXPECT_GT(ab.p, 0.0);
        EXPECT_LE(ab.p, 1.0);
    }
}

TEST(HarnessProperty, MannWhitneyExactMatchesEnumeration) {
    gen::Rng rng(705);
    for (int i = 0; i < 50; ++i) {
        const std::size_t na = 1 + gen::index(rng, 8);
        const std::size_t nb = 1 + gen::index(rng, 8);
        const auto a = i % 2 ? gen::sample(na, rng, 4) : gen::continuous_sample(na, rng);
        const auto b = i % 2 ? gen::sample(nb, rng, 4) : gen::continuous_sample(nb, rng);
        const auto r = stats::mann_whitney_u(a, b);
        EXPECT_TRUE(r.exact);
        EXPECT_NEAR(r.p, oracle::mwu_enumerated_p(a, b), 1e-12);
    }
}

TEST(HarnessProperty, SignificanceNeedsNonNegligibleEffect) {
    gen::Rng rng(706);
    for (int i = 0; i < 300; ++i) {
        const auto a = gen::sample(5 + gen::index(rng, 60), rng);
        auto b = gen::sample(5 + gen::index(rng, 60), rng);
        if (i % 3 == 0)
            for (auto& x : b) x += 0.3;
        const auto c = stats::compare(a, b);
        if (c.effect.magnitude == stats::Magnitude::N) {
            EXPECT_FALSE(c.significant);
        }
        if (c.mwu.p > 0.05) {
            EXPECT_FALSE(c.significant);
        }
        EXPECT_EQ(c.significant, c.mwu.p <= 0.05 && c.effect.magnitude != stats::Magnitude::N);
    }
}

TEST(HarnessProperty, BootstrapIntervalBracketsMean) {
    gen::Rng rng(707);
    for (int i = 0; i < 60; ++i) {
        const auto v = gen::continuous_sample(1 + gen::index(rng, 40), rng);
        const auto ci = stats::bootstrap_ci(v, 0.99, 2000, rng());
        const double m = stats::mean(v);
        EXPECT_LE(ci.lo, m + 1e-12);
        EXPECT_GE(ci.hi, m - 1e-12);
        EXPECT_LE(ci.lo, ci.hi);
    }
    const std::vector<double> constant(17, 0.625);
    const auto ci = stats::bootstrap_ci(constant, 0.99, 500, 3);
    EXPECT_EQ(ci.lo, 0.625);
    EXPECT_EQ(ci.hi, 0.625);
}

TEST(HarnessProperty, QuantilesOrdered) {
    gen::Rng rng(708);
    for (int i = 0; i < 200; ++i) {
        const auto v = gen::continuous_sample(1 + gen::index(rng, 50), rng);
        const auto s = stats::summarize(v);
        EXPECT_LE(*std::min_element(v.begin(), v.end()), s.q1);
        EXPECT_LE(s.q1, s.median);
        EXPECT_LE(s.median, s.q3);
        EXPECT_LE(s.q3, *std::max_element(v.begin(), v.end()));
        EXPECT_NEAR(s.iqr, s.q3 - s.q1, 1e-15);
    }
}

TEST(HarnessProperty, MatrixDeterministicAcrossRunsAndWorkers) {
    auto cfg = small_config();
    const auto serial = eval::run_matrix(cfg);
    cfg.workers = 3;
    const auto pooled = eval::run_matrix(cfg);
    std::ostringstream a, b;
    eval::write_csv(a, serial);
    eval::write_csv(b, pooled);
    EXPECT_EQ(a.str(), b.str());
    std::ostringstream again;
    cfg.workers = 1;
    eval::write_csv(again, eval::run_matrix(cfg));
    EXPECT_EQ(a.str(), again.str());
}

TEST(HarnessProperty, RecordsConsistent) {
    const auto cfg = small_config();
    const auto records = eval::run_matrix(cfg);
    EXPECT_EQ(records.size(), eval::enumerate_trials(cfg).size() * cfg.thresholds.size());
    for (const auto& r : records) {
        ASSERT_TRUE(r.ok()) << r.error;
        EXPECT_EQ(r.counts, eval::classify(r.verdict, r.fault, r.segments));
        EXPECT_EQ(r.counts.total(), r.verdict.segments_executed);
        EXPECT_LE(r.verdict.segments_executed, r.segments);
        if (r.verdict.faulty) {
            EXPECT_LT(r.verdict.segment, r.segments);
        }
        if (r.fault) {
            EXPECT_LT(r.fault->segment, r.segments);
        }
        const auto row = eval::to_row(r);
        EXPECT_EQ(row.fault_segment.has_value(), r.fault.has_value());
        if (row.fault_segment) {
            EXPECT_GE(*row.fault_segment, 1U);
        }
    }
}

TEST(HarnessProperty, CsvRoundTrip) {
    const auto records = eval::run_matrix(small_config());
    std::ostringstream out;
    eval::write_csv(out, records);
    std::istringstream in(out.str());
    const auto rows = eval::read_csv(in);
    ASSERT_EQ(rows.size(), records.size());
    std::ostringstream again;
    eval::write_csv(again, rows);
    EXPECT_EQ(again.str(), out.str());
}

TEST(HarnessProperty, ReportStatisticsInRange) {
    std::ostringstream out;
    eval::write_csv(out, eval::run_matrix(small_config()));
    std::istringstream in(out.str());
    const auto rows = eval::read_csv(in);
    eval::ReportOptions opt;
    opt.resamples = 500;
    for (const auto& g : eval::report(rows, eval::default_groupings(), opt)) {
        for (const auto& [name, s] : g.approaches) {
            EXPECT_GE(s.mean_f1, 0.0);
            EXPECT_LE(s.mean_f1, 1.0);
            EXPECT_LE(s.ci.lo, s.mean_f1 + 1e-12);
            EXPECT_GE(s.ci.hi, s.mean_f1 - 1e-12);
        }
        if (g.bloq_vs_proq) {
            EXPECT_GE(g.bloq_vs_proq->effect.a12, 0.0);
            EXPECT_LE(g.bloq_vs_proq->effect.a12, 1.0);
            if (g.bloq_vs_proq->effect.magnitude == stats::Magnitude::N) {
                EXPECT_EQ(g.winner(), "In-Sig");
            }
        }
    }
}
