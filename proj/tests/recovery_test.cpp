#include "rsparse/recovery.hpp"
#include "rsparse/threshold.hpp"

#include <gtest/gtest.h>

using namespace rsparse;

TEST(SolveBp, IdentityReturnsMeasurement) {
    Rng rng(1);
    ComplexVector y(5);
    for (Eigen::Index i = 0; i < 5; ++i) y(i) = sample_coefficient({}, rng);
    const auto out = solve_bp(ComplexMatrix::Identity(5, 5), y);
    EXPECT_TRUE(out.converged);
    EXPECT_LE((out.xHat - y).norm(), 1e-8);
}

TEST(SolveBp, SpikeOnTwoOnb) {
    const auto d = build_two_onb(4);
    ComplexVector x = ComplexVector::Zero(8);
    x(0) = 1.0;
    const auto out = solve_bp(d.matrix(), d.matrix() * x);
    EXPECT_TRUE(out.converged);
    EXPECT_LE((out.xHat - x).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT(1.0, classical_threshold(0.5).value);
}

TEST(SolveBp, ZeroMeasurement) {
    const auto out = solve_bp(build_mub(3).matrix(), ComplexVector::Zero(3));
    EXPECT_TRUE(out.converged);
    EXPECT_EQ(out.xHat.norm(), 0.0);
    EXPECT_EQ(out.xHat.size(), 12);
}

TEST(SolveBp, ReportsNonConvergenceWithoutThrowing) {
    const auto d = build_mub(5);
    Rng rng(2);
    const auto inst = sample_instance(d, {{0, 1}, 2}, {}, rng);
    BpSolverConfig cfg;
    cfg.maxIterations = 2;
    const auto out = solve_bp(d.matrix(), inst.y, cfg);
    EXPECT_FALSE(out.converged);
    EXPECT_EQ(out.iterations, 2u);
    EXPECT_LE(out.feasibilityResidual, 1e-10);
}

TEST(SolveBp, RejectsBadInput) {
    EXPECT_THROW(solve_bp(ComplexMatrix::Identity(3, 3), ComplexVector::Ones(4)), Error);
    BpSolverConfig cfg;
    cfg.stepParameter = 0.0;
    EXPECT_THROW(solve_bp(ComplexMatrix::Identity(3, 3), ComplexVector::Ones(3), cfg), Error);
}

TEST(SolveBp, PhaseEquivariance) {
    const auto d = build_two_onb(8);
    Rng rng(3);
    const auto inst = sample_instance(d, {{2}, 1}, {}, rng);
    const Complex phase = std::polar(1.0, 1.234);
    const auto a = solve_bp(d.matrix(), inst.y);
    const auto b = solve_bp(d.matrix(), ComplexVector(phase * inst.y));
    EXPECT_LE((b.xHat - phase * a.xHat).norm(), 1e-6);
}

TEST(BruteForceL0, Examples) {
    const auto d = build_two_onb(4).matrix();
    const auto single = brute_force_l0(d, d.col(3), 2);
    EXPECT_EQ(single.sparsity, 1u);
    EXPECT_EQ(single.solutions, (std::vector<IndexSet>{{3}}));

    const auto zero = brute_force_l0(d, ComplexVector::Zero(4), 2);
    EXPECT_EQ(zero.sparsity, 0u);
    EXPECT_TRUE(zero.unique());
    EXPECT_TRUE(zero.solutions[0].empty());

    Rng rng(4);
    ComplexVector x = ComplexVector::Zero(8);
    x(1) = std::polar(1.0, 2.0 * kPi * uniform01(rng));
    x(5) = std::polar(1.0, 2.0 * kPi * uniform01(rng));
    const auto two = brute_force_l0(d, d * x, 3);
    EXPECT_EQ(two.sparsity, 2u);
    EXPECT_TRUE(two.unique());
    EXPECT_EQ(two.solutions[0], (IndexSet{1, 5}));
}

TEST(BruteForceL0, Caps) {
    EXPECT_THROW(brute_force_l0(build_mub(7).matrix(), ComplexVector::Ones(7), 2), Error);
    EXPECT_THROW(brute_force_l0(build_two_onb(4).matrix(), ComplexVector::Ones(4), 5), Error);
    // nothing at most 1-sparse reaches a dense vector
    const auto none = brute_force_l0(build_two_onb(4).matrix(), ComplexVector::Unit(4, 0) + ComplexVector::Unit(4, 1), 1);
    EXPECT_FALSE(none.sparsity.has_value());
}

TEST(RecoveryTrial, TrivialCases) {
    Rng rng(5);
    const auto d = build_two_onb(4);
    EXPECT_TRUE(recovery_trial(d, {{}, 0}, {}, {}, rng).success());
    const PartitionedDictionary id(ComplexMatrix::Identity(6, 6), 3);
    for (int t = 0; t < 20; ++t) EXPECT_TRUE(recovery_trial(id, {{0, 2}, 2}, {}, {}, rng).success());
}

TEST(RecoveryTrial, AgreesWithL0OracleOnTwoOnb) {
    const auto d = build_two_onb(8);
    int successes = 0;
    for (std::uint64_t t = 0; t < 200; ++t) {
        Rng rng = make_stream(6, t);
        const auto a = choose_support_a(strategy::RandomBaseline{t}, 8, 1, &rng);
        const auto trial = recovery_trial(d, {a, 1}, {}, {}, rng);
        ASSERT_TRUE(trial.outcome.converged);
        EXPECT_LE(trial.outcome.l1Value, trial.instance.x.cwiseAbs().sum() + 1e-6);
        const auto l0 = brute_force_l0(d.matrix(), trial.instance.y, 2);
        ASSERT_TRUE(l0.unique());
        IndexSet planted = trial.instance.support;
        std::sort(planted.begin(), planted.end());
        EXPECT_EQ(l0.solutions[0], planted);
        EXPECT_EQ(numerical_support(trial.outcome.xHat), l0.solutions[0]) << "trial " << t;
        successes += trial.success();
    }
    EXPECT_EQ(successes, 200);
}

TEST(Sweep, EmptyCellAlwaysSucceedsAndOverfullCellsFail) {
    const auto d = build_two_onb(4);
    SweepOptions opt;
    opt.masterSeed = 7;
    const auto g = run_recovery_sweep(d, {0, 3}, {0, 2}, 10, {strategy::FirstN{}}, opt);
    ASSERT_EQ(g.cells.size(), 4u);
    EXPECT_DOUBLE_EQ(g.cells[0].rate(), 1.0);
    const auto& full = g.cells[3];
    EXPECT_EQ(full.nA + full.nB, 5u);
    EXPECT_DOUBLE_EQ(full.rate(), 0.0);
}

TEST(Sweep, DeterministicAcrossThreads) {
    const auto d = build_two_onb(8);
    SweepOptions a, b;
    a.masterSeed = b.masterSeed = 8;
    b.threads = 3;
    const std::vector<SupportStrategy> strats{strategy::FirstN{}, strategy::RandomBaseline{1}};
    const auto ga = run_recovery_sweep(d, {0, 1, 2}, {0, 1, 2}, 5, strats, a);
    const auto gb = run_recovery_sweep(d, {0, 1, 2}, {0, 1, 2}, 5, strats, b);
    ASSERT_EQ(ga.cells.size(), 18u);
    for (std::size_t i = 0; i < ga.cells.size(); ++i) {
        EXPECT_EQ(ga.cells[i].successes, gb.cells[i].successes);
        EXPECT_EQ(ga.cells[i].strategy, gb.cells[i].strategy);
    }
}

TEST(Sweep, RejectsOutOfRange) {
    const auto d = build_two_onb(4);
    EXPECT_THROW(run_recovery_sweep(d, {5}, {0}, 1, {strategy::FirstN{}}), Error);
    EXPECT_THROW(run_recovery_sweep(d, {0}, {0}, 0, {strategy::FirstN{}}), Error);
}
