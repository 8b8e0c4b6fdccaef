#include <gtest/gtest.h>

#include "../support/generators.hpp"

using namespace bloq;
using faults::FaultCategory;
using faults::FaultSpec;

namespace {

std::vector<Circuit> subjects(gen::Rng& rng) {
    std::vector<Circuit> out;
    for (const auto& p : gen::programs(5, 5)) out.push_back(build_program(p));
    for (int i = 0; i < 60; ++i)
        out.push_back(gen::circuit(2 + static_cast<unsigned>(gen::index(rng, 3)), 1 + gen::index(rng, 3), 5, rng));
    return out;
}

}  // namespace

TEST(FaultProperty, CatalogWellFormed) {
    gen::Rng rng(601);
    for (const auto& c : subjects(rng)) {
        const auto catalog = faults::enumerate_faults(c, 99);
        for (const auto& f : catalog) {
            ASSERT_LT(f.segment, c.num_segments());
            const auto seg = c.segment(f.segment);
            for (unsigned q : f.qubits) EXPECT_LT(q, c.num_qubits());
            switch (f.category) {
                case FaultCategory::Add:
                    ASSERT_TRUE(f.gate.has_value());
                    EXPECT_TRUE(faults::is_fault_gate(*f.gate));
                    EXPECT_EQ(f.position, seg.size());
                    if (c.program().kind == ProgramKind::QFT && *f.gate != GateKind::CNOT) {
                        EXPECT_EQ(f.qubits, std::vector<unsigned>{static_cast<unsigned>(f.segment)});
                    }
                    break;
                case FaultCategory::Remove:
                    EXPECT_FALSE(f.gate.has_value());
                    ASSERT_LT(f.position, seg.size());
                    EXPECT_EQ(f.qubits, seg[f.position].qubits());
                    break;
                case FaultCategory::Replace:
                    ASSERT_TRUE(f.gate.has_value());
                    ASSERT_LT(f.position, seg.size());
                    EXPECT_NE(*f.gate, seg[f.position].kind);
                    EXPECT_TRUE(faults::is_fault_gate(*f.gate));
                    break;
            }
        }
        // six Adds per segment plus a Remove and a Replace for non-empty ones
        std::size_t want = 0;
        for (std::size_t k = 0; k < c.num_segments(); ++k) want += 6 + (c.segment(k).empty() ? 0 : 2);
        EXPECT_EQ(catalog.size(), want);
    }
}

TEST(FaultProperty, MutantsAreValidCircuits) {
    gen::Rng rng(602);
    for (const auto& c : subjects(rng))
        for (const auto& f : faults::enumerate_faults(c, 5)) {
            const auto m = faults::inject(c, f);
            EXPECT_EQ(m.num_qubits(), c.num_qubits());
            EXPECT_EQ(m.num_segments(), c.num_segments());
            EXPECT_EQ(m.program(), c.program());
            const auto& pre = m.preamble();
            ASSERT_EQ(pre.size(), c.preamble().size());
            for (std::size_t i = 0; i < pre.size(); ++i) EXPECT_EQ(pre[i], c.preamble()[i]);
            EXPECT_EQ(deserialize(serialize(m)), m);
            // only the targeted segment changes
            for (std::size_t k = 0; k < c.num_segments(); ++k) {
                const auto a = c.segment(k);
                const auto b = m.segment(k);
                if (k != f.segment) {
                    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
                    continue;
                }
                const std::ptrdiff_t delta = f.category == FaultCategory::Add      ? 1
                                             : f.category == FaultCategory::Remove ? -1
                                                                                   : 0;
                EXPECT_EQ(static_cast<std::ptrdiff_t>(b.size()) - static_cast<std::ptrdiff_t>(a.size()), delta);
            }
        }
}

TEST(FaultProperty, AddIsUndoneByRemove) {
    gen::Rng rng(603);
    for (const auto& c : subjects(rng))
        for (const auto& f : faults::enumerate_faults(c, 17)) {
            if (f.category != FaultCategory::Add) continue;
            const auto m = faults::inject(c, f);
            FaultSpec undo{FaultCategory::Remove, std::nullopt, f.segment, f.qubits, f.position, f.seed};
            EXPECT_EQ(faults::inject(m, undo), c);
        }
}

TEST(FaultProperty, ObservabilityMatchesFinalState) {
    gen::Rng rng(604);
    for (const auto& c : subjects(rng)) {
        const auto psi = run_statevector(c);
        for (const auto& f : faults::enumerate_faults(c, 23)) {
            const auto m = faults::inject(c, f);
            const auto phi = run_statevector(m);
            complex ip{0.0};
            for (std::size_t i = 0; i < psi.dim(); ++i) ip += std::conj(psi[i]) * phi[i];
            EXPECT_EQ(faults::is_observable(c, m), std::norm(ip) < 1.0 - 1e-9);
        }
        EXPECT_FALSE(faults::is_observable(c, c));
    }
}

TEST(FaultProperty, CatalogDeterministicPerSeed) {
    gen::Rng rng(605);
    for (const auto& c : subjects(rng)) {
        EXPECT_EQ(faults::enumerate_faults(c, 1234), faults::enumerate_faults(c, 1234));
    }
}

TEST(FaultProperty, JsonRoundTrip) {
    gen::Rng rng(606);
    for (const auto& c : subjects(rng))
        for (const auto& f : faults::enumerate_faults(c, 8)) EXPECT_EQ(faults::fault_from_json(faults::fault_to_json(f)), f);
}

TEST(FaultProperty, InvalidSpecsRejected) {
    gen::Rng rng(607);
    for (const auto& c : subjects(rng)) {
        const unsigned n = c.num_qubits();
        const std::size_t K = c.num_segments();
        EXPECT_ANY_THROW(faults::inject(c, {FaultCategory::Add, GateKind::X, K, {0}, 0, 0}));
        EXPECT_ANY_THROW(faults::inject(c, {FaultCategory::Add, GateKind::X, 0, {n}, 0, 0}));
        EXPECT_ANY_THROW(faults::inject(c, {FaultCategory::Add, GateKind::Rz, 0, {0}, 0, 0}));
        EXPECT_ANY_THROW(faults::inject(c, {FaultCategory::Add, GateKind::CNOT, 0, {0, 0}, 0, 0}));
        EXPECT_ANY_THROW(faults::inject(c, {FaultCategory::Add, std::nullopt, 0, {0}, 0, 0}));
        EXPECT_ANY_THROW(faults::inject(c, {FaultCategory::Add, GateKind::X, 0, {0}, c.segment(0).size() + 1, 0}));
        const auto seg = c.segment(0);
        EXPECT_ANY_THROW(faults::inject(c, {FaultCategory::Remove, std::nullopt, 0, {}, seg.size(), 0}));
        if (!seg.empty()) {
            const GateKind same = seg[0].kind;
            if (faults::is_fault_gate(same) && same != GateKind::CNOT) {
                EXPECT_THROW(faults::inject(c, {FaultCategory::Replace, same, 0, {seg[0].targets[0]}, 0, 0}),
                             ValidationError);
            }
        }
    }
}
