#include <gtest/gtest.h>

#include <cmath>

#include "bloq/assertions.hpp"
#include "bloq/fault_equivalence.hpp"
#include "bloq/faults.hpp"
#include "../support/oracles.hpp"

using namespace bloq;
using namespace bloq::assertions;

namespace {

DensityMatrix pure_with_z(double z) { return density_from_bloch({std::sqrt(1.0 - z * z), 0.0, z}); }

const DensityMatrix zero = density_from_bloch({0, 0, 1});

Circuit with_added(const Circuit& c, GateKind g, std::size_t segment, std::vector<unsigned> qs) {
    faults::FaultSpec f{faults::FaultCategory::Add, g, segment, std::move(qs), c.segment(segment).size(), 0};
    return faults::inject(c, f);
}

}  // namespace

TEST(BloqSingleAssess, Examples) {
    EXPECT_TRUE(bloq_single_assess(zero, zero, 0).pass);
    EXPECT_NEAR(bloq_single_assess(zero, zero, 0).fidelity, 1.0, 1e-12);
    const auto f96 = bloq_single_assess(pure_with_z(0.92), zero, 3);
    EXPECT_NEAR(f96.fidelity, 0.96, 1e-12);
    EXPECT_FALSE(f96.pass);
    const auto f97 = bloq_single_assess(pure_with_z(0.94), zero, 3);
    EXPECT_NEAR(f97.fidelity, 0.97, 1e-12);
    EXPECT_TRUE(f97.pass);
}

TEST(BloqSingleAssess, Errors) {
    const auto two = DensityMatrix::maximally_mixed(2);
    EXPECT_THROW(bloq_single_assess(two, zero, 0), DimensionError);
    EXPECT_THROW(bloq_single_assess(zero, zero, -1), ValidationError);
    EXPECT_THROW(bloq_single_assess(zero, zero, 101), ValidationError);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = 2.0;
    bad(1, 1) = -1.0;
    EXPECT_THROW(bloq_single_assess(DensityMatrix(bad, DensityMatrix::Unchecked{}), zero, 0), InvalidStateError);
}

TEST(BloqSegmentAssess, Examples) {
    const AssertionOutcome p{true, 1.0, 0, 0};
    const AssertionOutcome f{false, 0.5, 1, 0};
    EXPECT_TRUE(bloq_segment_assess({p, p, p}));
    EXPECT_FALSE(bloq_segment_assess({p, f}));
    EXPECT_FALSE(bloq_segment_assess({f}));
    EXPECT_THROW(bloq_segment_assess({}), ValidationError);
    EXPECT_THROW(bloq_segment_assess({p, {true, 1.0, 0, 1}}), ValidationError);
}

TEST(RunBloq, FaultFreeQftAnalyticIsClean) {
    const auto c = build_qft(3, "101");
    const auto v = run_bloq(c, autobloq::build_scheme(c.program()), BackendConfig::ideal(), 0, 0);
    EXPECT_FALSE(v.faulty);
    EXPECT_EQ(v.segments_executed, 3U);
    EXPECT_EQ(v.assertions.size(), 3U);
    EXPECT_EQ(v.shots_used, 0U);
}

TEST(RunBloq, GroverAddedXIsLocalized) {
    for (unsigned q = 0; q < 2; ++q) {
        const auto original = build_grover(2, "10");
        const auto c = with_added(original, GateKind::X, 0, {q});
        const auto v = run_bloq(c, autobloq::build_scheme(original.program()), BackendConfig::ideal(), 8192, 6);
        ASSERT_TRUE(v.faulty);
        EXPECT_EQ(v.segment, 0U);
        EXPECT_EQ(v.qubit, q);
        EXPECT_EQ(verdict_to_json(v)["segment"], 1);
    }
}

TEST(RunBloq, EarlyExitAndShotAccounting) {
    // qubit 1 of input 001 sits at phase pi/2, so an X flips its y component
    const auto original = build_qft(3, "001");
    const auto c = with_added(original, GateKind::X, 1, {1});
    const auto v = run_bloq(c, autobloq::build_scheme(original.program()), BackendConfig::ideal(), 1000, 5);
    ASSERT_TRUE(v.faulty);
    EXPECT_EQ(v.segment, 1U);
    EXPECT_EQ(v.qubit, 1U);
    EXPECT_EQ(v.segments_executed, 2U);
    EXPECT_EQ(v.shots_used, 2U * 3U * 1000U);
    EXPECT_EQ(v.segment_failed, (std::vector<bool>{false, true}));
    EXPECT_NEAR(v.assertions.back().fidelity, 0.0, 0.05);
}

TEST(RunBloq, GroverAssertsEveryQubitAscending) {
    const auto c = build_grover(3, "011");
    const auto v = run_bloq(c, autobloq::build_scheme(c.program()), BackendConfig::ideal(), 0, 0);
    EXPECT_FALSE(v.faulty);
    ASSERT_EQ(v.assertions.size(), 6U);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(v.assertions[i].q, i % 3);
        EXPECT_EQ(v.assertions[i].k, i / 3);
    }
}

TEST(RunBloq, DepthCoversBasisChange) {
    const auto c = build_qft(2, "01");
    const auto v = run_bloq(c, autobloq::build_scheme(c.program()), BackendConfig::ideal(), 0, 0);
    EXPECT_GE(v.depth_executed, circuit_depth(c));
    EXPECT_LE(v.depth_executed, circuit_depth(c) + 2);
}

TEST(BloqSession, MeasurementsReusedAcrossThresholds) {
    const auto c = build_grover(3, "110");
    BloqSession s(c, autobloq::build_scheme(c.program()), BackendConfig::noisy(7), 512, false);
    const auto first = s.run(0);
    const auto again = s.run(0);
    EXPECT_EQ(first.assertions.size(), again.assertions.size());
    for (std::size_t i = 0; i < first.assertions.size(); ++i)
        EXPECT_EQ(first.assertions[i].fidelity, again.assertions[i].fidelity);
    EXPECT_EQ(first.runtime_ms, 0.0);
}

TEST(BloqSession, RejectsSchemeThatDoesNotCover) {
    const auto c = build_qft(3, "000");
    EXPECT_THROW(BloqSession(c, autobloq::AssertionScheme(c.program(), 3), BackendConfig::ideal(), 0), IndexError);
}

TEST(VerdictJson, Shape) {
    const auto c = build_qft(2, "01");
    const auto v = run_bloq(c, autobloq::build_scheme(c.program()), BackendConfig::ideal(), 0, 0);
    const auto j = verdict_to_json(v);
    EXPECT_EQ(j["result"], "clean");
    EXPECT_TRUE(j["segment"].is_null());
    EXPECT_TRUE(j["qubit"].is_null());
    EXPECT_EQ(j["segments_executed"], 2);
    EXPECT_EQ(j["assertions"].size(), 2U);
    EXPECT_EQ(j["assertions"][0]["k"], 1);
    EXPECT_EQ(j["assertions"][0]["verdict"], "pass");
}

TEST(InferFaultUnitary, PlusToMinusIsY) {
    const auto sigma = density_from_bloch({1, 0, 0});
    const auto rho = density_from_bloch({-1, 0, 0});
    const auto f = infer_fault_unitary(rho, sigma);
    ASSERT_TRUE(f);
    EXPECT_EQ(f->gate, "y");
    EXPECT_LT(distance_up_to_phase(f->F.matrix(), pauli(Axis::Y).matrix()), 1e-8);
    EXPECT_LT((f->F.matrix() * sigma.matrix() * f->F.matrix().adjoint() - rho.matrix()).norm(), 1e-8);
}

TEST(InferFaultUnitary, EqualStatesGiveIdentity) {
    const auto s = density_from_bloch({0.3, -0.2, 0.5});
    const auto f = infer_fault_unitary(s, s);
    ASSERT_TRUE(f);
    EXPECT_EQ(f->gate, "id");
    EXPECT_LT(distance_up_to_phase(f->F.matrix(), Matrix::Identity(2, 2)), 1e-12);
}

TEST(InferFaultUnitary, SpectraMismatch) {
    EXPECT_FALSE(infer_fault_unitary(DensityMatrix::maximally_mixed(1), zero));
    EXPECT_FALSE(infer_fault_unitary(density_from_bloch({0, 0, 0.5}), density_from_bloch({0.9, 0, 0})));
    EXPECT_THROW(infer_fault_unitary(DensityMatrix::maximally_mixed(2), zero), DimensionError);
}

TEST(InferFaultUnitary, DegenerateSpectrumIsFlagged) {
    const auto mixed = DensityMatrix::maximally_mixed(1);
    const auto f = infer_fault_unitary(mixed, mixed);
    ASSERT_TRUE(f);
    EXPECT_TRUE(f->non_unique);
    EXPECT_FALSE(infer_fault_unitary(zero, density_from_bloch({1, 0, 0}))->non_unique);
}

TEST(InferFaultUnitary, EigenbasisConstruction) {
    // a rotation outside the fault-gate set
    const auto sigma = density_from_bloch({0, 0, 0.8});
    const auto rho = density_from_bloch({0.8 * std::sin(0.3), 0, 0.8 * std::cos(0.3)});
    const auto f = infer_fault_unitary(rho, sigma);
    ASSERT_TRUE(f);
    EXPECT_TRUE(f->gate.empty());
    const Matrix& F = f->F.matrix();
    EXPECT_LT((F * F.adjoint() - Matrix::Identity(2, 2)).norm(), 1e-8);
    EXPECT_LT((F * sigma.matrix() * F.adjoint() - rho.matrix()).norm(), 1e-8);
}

TEST(DistanceUpToPhase, IgnoresGlobalPhase) {
    const Matrix y = pauli(Axis::Y).matrix();
    EXPECT_LT(distance_up_to_phase(complex(0, 1) * y, y), 1e-15);
    EXPECT_GT(distance_up_to_phase(pauli(Axis::X).matrix(), y), 0.5);
}
