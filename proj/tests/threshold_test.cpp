#include "rsparse/threshold.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

using namespace rsparse;

TEST(ClassicalThreshold, Examples) {
    EXPECT_DOUBLE_EQ(classical_threshold(1.0).value, 1.0);
    EXPECT_DOUBLE_EQ(classical_threshold(0.5).value, 1.5);
    EXPECT_NEAR(classical_threshold(1.0 / std::sqrt(3.0)).value, 1.3660254, 1e-7);
    const auto onb = classical_threshold(0.0);
    EXPECT_TRUE(onb.unbounded);
    EXPECT_TRUE(std::isinf(onb.value));
}

TEST(TwoOnbConditions, Examples) {
    const auto r7 = check_theorem1(0.01, 200, {1.0, 0.5, 3, 4});
    const auto* twoOnb = r7.find(ConditionId::TwoOnbUnique);
    ASSERT_NE(twoOnb, nullptr);
    EXPECT_NEAR(twoOnb->rhs, 42.12 / std::log(200.0), 1e-12);
    EXPECT_NEAR(twoOnb->rhs, 7.9497, 1e-4);
    EXPECT_TRUE(twoOnb->satisfied);

    const auto r8 = check_theorem1(0.01, 200, {1.0, 0.5, 4, 4});
    EXPECT_FALSE(r8.find(ConditionId::TwoOnbUnique)->satisfied);
    EXPECT_FALSE(r8.p0Premise);

    const auto r0 = check_theorem1(0.3, 10, {1.0, 0.5, 0, 0});
    EXPECT_TRUE(r0.p0Premise);
    EXPECT_TRUE(r0.p0p1Premise);
}

TEST(TwoOnbConditions, ConstantOverride) {
    const auto r = check_theorem1(0.01, 200, {1.0, 0.5, 4, 4}, 0.01);
    EXPECT_NEAR(r.find(ConditionId::TwoOnbUnique)->rhs, 100.0 / std::log(200.0), 1e-12);
}

TEST(TwoOnbConditions, RequiresNAboveTwo) {
    EXPECT_THROW(check_theorem1(0.1, 2, {}), Error);
    EXPECT_THROW(check_theorem1(0.0, 10, {}), Error);
}

TEST(CondA, Examples) {
    const auto zeroMu = check_cond_a(0.0, 0.7, 100, {1.0, 0.0, 1, 0});
    EXPECT_DOUBLE_EQ(zeroMu.lhs, 0.0);
    EXPECT_NEAR(zeroMu.rhs, std::exp(-0.25), 1e-15);
    EXPECT_TRUE(zeroMu.satisfied);

    const auto small = check_cond_a(0.01, 0.0, 100, {1.0, 0.0, 1, 0});
    // 6 sqrt(2) * 0.01 * sqrt(log 100); commonly quoted rounded as 0.18211
    EXPECT_NEAR(small.lhs, 6.0 * std::sqrt(2.0) * 0.01 * std::sqrt(std::log(100.0)), 1e-15);
    EXPECT_NEAR(small.lhs, 0.18209, 1e-5);
    EXPECT_TRUE(small.satisfied);

    const auto large = check_cond_a(0.1, 0.0, 100, {1.0, 0.0, 1, 0});
    EXPECT_NEAR(large.lhs, 1.8209, 1e-4);
    EXPECT_FALSE(large.satisfied);
}

TEST(CondA, ZeroColumnsConvention) {
    const auto c = check_cond_a(0.9, 0.9, 100, {1.0, 1.0, 0, 0});
    EXPECT_DOUBLE_EQ(c.lhs, 0.0);
    EXPECT_TRUE(c.satisfied);
    EXPECT_FALSE(c.note.empty());
}

TEST(CondB, Examples) {
    EXPECT_TRUE(check_cond_b(0.5, 3.0, 3.0, 10, 100, {1.0, 0.0, 0, 0}).satisfied);

    const auto noMu = check_cond_b(0.0, 1.0, 1.0, 100, 100, {1.0, 1.0, 0, 1});
    EXPECT_NEAR(noMu.lhs, 0.24, 1e-14);
    EXPECT_TRUE(noMu.satisfied);

    // muB enters once, under the root: 24 * 0.1 * sqrt(log 100) + 0.24
    const auto withMu = check_cond_b(0.1, 1.0, 1.0, 100, 100, {1.0, 1.0, 0, 1});
    EXPECT_NEAR(withMu.lhs, 24.0 * 0.1 * std::sqrt(std::log(100.0)) + 0.24, 1e-14);
    EXPECT_NEAR(withMu.lhs, 5.39032, 1e-5);
    EXPECT_FALSE(withMu.satisfied);

    // a coherence small enough to pass: 24 * 0.01 * sqrt(log 100) + 0.24 = 0.75503
    const auto small = check_cond_b(0.01, 1.0, 1.0, 100, 100, {1.0, 1.0, 0, 1});
    EXPECT_NEAR(small.lhs, 0.75503, 1e-5);
    EXPECT_TRUE(small.satisfied);
}

TEST(L0L1, Examples) {
    const auto a = check_l0_l1(1.0 / 8.0, 1000, {1.0, 0.5, 0, 0});
    EXPECT_NEAR(a.unique.rhs, 32.0, 1e-12);
    EXPECT_NEAR(a.recover.rhs, 0.57906, 1e-5);
    EXPECT_TRUE(a.unique.satisfied);
    EXPECT_TRUE(a.recover.satisfied);
    EXPECT_FALSE(check_l0_l1(1.0 / 8.0, 1000, {1.0, 0.5, 1, 0}).recover.satisfied);
    // strictness: n = mu^-2 / 2 exactly fails the uniqueness cap
    EXPECT_FALSE(check_l0_l1(0.5, 10, {1.0, 0.5, 1, 1}).unique.satisfied);
}

TEST(Properties, TwoOnbAndTotalRecoveryCapsAgree) {
    for (double mu : {0.01, 0.1, 0.3})
        for (std::size_t N : {3u, 100u, 4160u})
            for (double s : {1.0, 2.5}) {
                const TheoremParams p{s, 0.3, 1, 2};
                EXPECT_EQ(check_theorem1(mu, N, p).find(ConditionId::TwoOnbRecover)->rhs,
                          check_l0_l1(mu, N, p).recover.rhs);
            }
}

TEST(Properties, GammaTradeoffSumsToOne) {
    for (int i = 0; i <= 20; ++i) {
        const double g = i / 20.0;
        const TheoremParams p{1.0, g, 2, 2};
        const double ra = check_cond_a(0.1, 0.01, 100, p).rhs;
        const double rb = check_cond_b(0.1, 1.0, 1.0, 50, 100, p).rhs;
        EXPECT_NEAR((ra + rb) / std::exp(-0.25), 1.0, 1e-15);
    }
}

TEST(Properties, Monotonicity) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        const auto st = oracle::random_profile(rng);
        for (double g : {0.2, 0.7}) {
            bool prevA = true, prevB = true;
            double lastA = -1.0, lastB = -1.0;
            for (std::size_t n = 1; n <= 60; ++n) {
                const auto a = check_cond_a(st.mu, st.muA, st.N, {1.0, g, n, 0});
                const auto b = check_cond_b(st.muB, st.specA, st.specB, st.Nb, st.N, {1.0, g, 0, n});
                EXPECT_GE(a.lhs, lastA);
                EXPECT_GE(b.lhs, lastB);
                EXPECT_FALSE(!prevA && a.satisfied);
                EXPECT_FALSE(!prevB && b.satisfied);
                prevA = a.satisfied;
                prevB = b.satisfied;
                lastA = a.lhs;
                lastB = b.lhs;
            }
        }
    }
}

TEST(BlockConditionReport, ReportShape) {
    const auto st = analyze(build_mub(7));
    const auto r = check_theorem2(st, {1.0, 0.5, 0, 0});
    EXPECT_TRUE(r.p0Premise);
    EXPECT_TRUE(r.p0p1Premise);
    EXPECT_TRUE(r.all_satisfied());
    EXPECT_EQ(r.conditions.size(), 5u);
    const auto j = to_json(r);
    EXPECT_EQ(j["conditions"].size(), 5u);
    EXPECT_EQ(j["conditions"][0]["id"], "cond_a");

    const auto bad = check_theorem2(st, {1.0, 0.5, 3, 3});
    EXPECT_FALSE(bad.p0p1Premise);
}

TEST(BlockConditionReport, ZeroCoherenceDictionary) {
    const auto st = analyze(PartitionedDictionary(ComplexMatrix::Identity(4, 4), 2));
    const auto r = check_theorem2(st, {1.0, 0.5, 1, 1});
    EXPECT_TRUE(r.find(ConditionId::TotalUnique)->satisfied);
    EXPECT_TRUE(std::isinf(r.find(ConditionId::TotalUnique)->rhs));
    EXPECT_TRUE(to_json(r)["conditions"][2]["rhs"].is_null());
}

TEST(MaxSparsity, ForcedToZero) {
    DictionaryStats st;
    st.m = 4;
    st.N = 100;
    st.Na = 50;
    st.Nb = 50;
    st.mu = st.muA = st.muB = 0.9;
    st.specA = st.specB = 5.0;
    const auto r = max_sparsity_search(st, 1.0, default_gamma_grid());
    EXPECT_EQ(r.best, (SparsityPoint{0, 0, 0.0}));
}

TEST(MaxSparsity, AgreesWithScanOnZeroCoherenceProfile) {
    DictionaryStats st;
    st.m = 100;
    st.N = 100;
    st.Na = 50;
    st.Nb = 100;
    st.specA = st.specB = 1.0;
    for (double g : default_gamma_grid()) {
        const auto got = max_sparsity_at_gamma(st, 1.0, g, {50, 50});
        const auto want = oracle::best_by_scan(st, 1.0, g, 50, 50);
        EXPECT_EQ(got.nA, want.nA) << g;
        EXPECT_EQ(got.nB, want.nB) << g;
    }
}

TEST(MaxSparsity, AgreesWithScanOnRandomProfiles) {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 10; ++k) {
        const auto st = oracle::random_profile(rng);
        for (double s : {1.0, 2.0})
            for (double g : default_gamma_grid()) {
                const auto got = max_sparsity_at_gamma(st, s, g, {50, 50});
                const auto want = oracle::best_by_scan(st, s, g, 50, 50);
                ASSERT_EQ(got.nA, want.nA) << "profile " << k << " gamma " << g;
                ASSERT_EQ(got.nB, want.nB) << "profile " << k << " gamma " << g;
            }
    }
}

TEST(MaxSparsity, ResultRevalidates) {
    std::mt19937_64 rng(13);
    for (int k = 0; k < 10; ++k) {
        const auto st = oracle::random_profile(rng);
        const auto r = max_sparsity_search(st, 1.0, default_gamma_grid());
        EXPECT_TRUE(r.report.p0p1Premise);
        EXPECT_EQ(r.perGamma.size(), 21u);
        for (const auto& p : r.perGamma) {
            const bool beats = p.total() > r.best.total() ||
                               (p.total() == r.best.total() && p.nA > r.best.nA);
            EXPECT_FALSE(beats);
        }
    }
    EXPECT_THROW(max_sparsity_search(analyze(build_mub(3)), 1.0, {}), Error);
}

TEST(Scaling, MubSeven) {
    const auto sr = scaling_report(analyze(build_mub(7)));
    EXPECT_NEAR(sr.r1, 1.0, 1e-12);
    EXPECT_NEAR(sr.r2, 0.0, 1e-12);
    EXPECT_NEAR(sr.r4, 1.0 / std::log(56.0), 1e-9);
    EXPECT_NEAR(sr.r4, 0.248425, 1e-6);
    EXPECT_NEAR(sr.r3, 7.0 * std::log(56.0) / 7.0, 1e-12);
    EXPECT_GE(sr.r5, 0.0);
}
