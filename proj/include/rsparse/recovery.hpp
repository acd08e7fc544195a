#pragma once
//! \file recovery.hpp
//! \brief Basis pursuit (min ||x||_1 s.t. Dx = y) by ADMM, exhaustive l0
//! search for tiny problems, and Monte Carlo recovery sweeps.

#include "rsparse/model.hpp"

#include <optional>

namespace rsparse {

struct BpSolverConfig {
    double stepParameter = 1.0;  // initial ADMM penalty rho
    std::size_t maxIterations = 100000;
    double primalTolerance = 1e-8;
    double dualTolerance = 1e-8;
    bool adaptiveStep = true;  // residual balancing during the first iterations

    void validate() const {
        require(stepParameter > 0.0, "stepParameter must be > 0");
        require(maxIterations >= 1, "maxIterations must be >= 1");
        require(primalTolerance > 0.0 && dualTolerance > 0.0, "tolerances must be > 0");
    }
};

struct RecoveryOutcome {
    ComplexVector xHat;
    double relativeL2Error = 0.0;  // against the planted vector, when known
    bool supportMatch = false;
    double l1Value = 0.0;
    double feasibilityResidual = 0.0;  // ||D xHat - y|| / max(1, ||y||)
    std::size_t iterations = 0;
    bool converged = false;
};

namespace detail {

//! Complex soft threshold: v * max(0, 1 - tau / |v|), phase preserved.
inline void soft_threshold(ComplexVector& v, double tau) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        v(i) = a > tau ? v(i) * ((a - tau) / a) : Complex(0.0, 0.0);
    }
}

//! Orthogonal projection onto {x : Dx = y}.
class AffineProjector {
public:
    AffineProjector(const ComplexMatrix& d, const ComplexVector& y) : d_(d), y_(y) {
        const ComplexMatrix g = d * d.adjoint();
        llt_.compute(g);
        useLlt_ = llt_.info() == Eigen::Success;
        if (!useLlt_) cod_.compute(g);
    }

    ComplexVector operator()(const ComplexVector& v) const {
        const ComplexVector r = d_ * v - y_;
        const ComplexVector w = useLlt_ ? ComplexVector(llt_.solve(r)) : ComplexVector(cod_.solve(r));
        return v - d_.adjoint() * w;
    }

private:
    const ComplexMatrix& d_;
    const ComplexVector& y_;
    Eigen::LLT<ComplexMatrix> llt_;
    Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod_;
    bool useLlt_ = true;
};

}  // namespace detail

inline double feasibility_residual(const ComplexMatrix& d, const ComplexVector& x,
                                   const ComplexVector& y) {
    return (d * x - y).norm() / std::max(1.0, y.norm());
}

//! ADMM on min ||z||_1 s.t. x = z, Dx = y (scaled form). Returns the affine
//! iterate x, so feasibility holds to rounding at every iteration. Never
//! throws on non-convergence; `converged` is false instead.
inline RecoveryOutcome solve_bp(const ComplexMatrix& d, const ComplexVector& y,
                                const BpSolverConfig& cfg = {}) {
    cfg.validate();
    require(y.size() == d.rows(), "measurement length " + std::to_string(y.size()) +
                                      " does not match m = " + std::to_string(d.rows()));
    RecoveryOutcome out;
    const Eigen::Index N = d.cols();
    if (y.norm() == 0.0) {
        out.xHat = ComplexVector::Zero(N);
        out.converged = true;
        return out;
    }
    const detail::AffineProjector project(d, y);
    const double scale = std::max(1.0, y.norm());
    double rho = cfg.stepParameter;
    ComplexVector z = project(ComplexVector::Zero(N));
    ComplexVector u = ComplexVector::Zero(N);
    ComplexVector x = z;
    ComplexVector zOld(N);
    constexpr std::size_t kAdaptWindow = 2000;
    for (std::size_t k = 1; k <= cfg.maxIterations; ++k) {
        x = project(z - u);
        zOld = z;
        z = x + u;
        detail::soft_threshold(z, 1.0 / rho);
        u += x - z;
        const double primal = (x - z).norm();
        const double dual = rho * (z - zOld).norm();
        out.iterations = k;
        if (primal <= cfg.primalTolerance * scale && dual <= cfg.dualTolerance * scale) {
            out.converged = true;
            break;
        }
        if (cfg.adaptiveStep && k <= kAdaptWindow) {
            if (primal > 10.0 * dual) {
                rho *= 2.0;
                u /= 2.0;
            } else if (dual > 10.0 * primal) {
                rho /= 2.0;
                u *= 2.0;
            }
        }
    }
    out.xHat = x;
    out.l1Value = x.cwiseAbs().sum();
    out.feasibilityResidual = feasibility_residual(d, x, y);
    return out;
}

//! {i : |x_i| > floor}, with floor = relFloor * max |x_i|.
inline IndexSet numerical_support(const ComplexVector& x, double relFloor = 1e-6) {
    IndexSet supp;
    if (x.size() == 0) return supp;
    const double floor = relFloor * x.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::abs(x(i)) > floor) supp.push_back(static_cast<std::size_t>(i));
    return supp;
}

//! Fills the truth-dependent fields of `out`.
inline void score_against(RecoveryOutcome& out, const ComplexVector& xTrue, IndexSet trueSupport) {
    const double ref = xTrue.norm();
    const double err = (out.xHat - xTrue).norm();
    out.relativeL2Error = ref > 0.0 ? err / ref : err;
    std::sort(trueSupport.begin(), trueSupport.end());
    out.supportMatch = numerical_support(out.xHat) == trueSupport;
}

// ---------------------------------------------------------------------------

struct L0Result {
    std::optional<std::size_t> sparsity;  // k*, none if infeasible within kMax
    std::vector<IndexSet> solutions;      // every support of size k* that fits y

    bool unique() const { return sparsity && solutions.size() == 1; }
};

inline constexpr std::size_t kBruteForceMaxColumns = 32;
inline constexpr std::size_t kBruteForceMaxSparsity = 4;

//! Smallest k <= kMax with a size-k support T such that the least-squares
//! residual ||D_T c - y|| <= tol. tol < 0 selects the default 1e-8 ||y||.
inline L0Result brute_force_l0(const ComplexMatrix& d, const ComplexVector& y, std::size_t kMax,
                               double tol = -1.0) {
    const auto N = static_cast<std::size_t>(d.cols());
    require(N <= kBruteForceMaxColumns, "brute-force l0 search is capped at N <= 32 (got " +
                                            std::to_string(N) + ")");
    require(kMax <= kBruteForceMaxSparsity, "brute-force l0 search is capped at kMax <= 4");
    require(y.size() == d.rows(), "measurement length does not match dictionary rows");
    if (tol < 0.0) tol = 1e-8 * y.norm();
    L0Result res;
    if (y.norm() <= tol) {
        res.sparsity = 0;
        res.solutions.push_back({});
        return res;
    }
    for (std::size_t k = 1; k <= kMax && !res.sparsity; ++k) {
        if (k > N) break;
        IndexSet idx(k);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        while (true) {
            ComplexMatrix dt(d.rows(), static_cast<Eigen::Index>(k));
            for (std::size_t c = 0; c < k; ++c) dt.col(static_cast<Eigen::Index>(c)) = d.col(static_cast<Eigen::Index>(idx[c]));
            const ComplexVector coef = dt.colPivHouseholderQr().solve(y);
            if ((dt * coef - y).norm() <= tol) res.solutions.push_back(idx);
            // next combination in lexicographic order
            std::size_t pos = k;
            while (pos > 0 && idx[pos - 1] == N - k + pos - 1) --pos;
            if (pos == 0) break;
            ++idx[pos - 1];
            for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
        if (!res.solutions.empty()) res.sparsity = k;
    }
    return res;
}

// ---------------------------------------------------------------------------

//! Success means relative l2 error <= this.
inline constexpr double kRecoverySuccessTolerance = 1e-4;

struct RecoveryTrial {
    SparseInstance instance;
    RecoveryOutcome outcome;

    bool success() const { return outcome.relativeL2Error <= kRecoverySuccessTolerance; }
};

inline RecoveryTrial recovery_trial(const PartitionedDictionary& dict,
                                    const HybridSupportSpec& spec, const CoefficientSpec& coeff,
                                    const BpSolverConfig& cfg, Rng& rng) {
    RecoveryTrial t;
    t.instance = sample_instance(dict, spec, coeff, rng);
    t.outcome = solve_bp(dict.matrix(), t.instance.y, cfg);
    score_against(t.outcome, t.instance.x, t.instance.support);
    return t;
}

struct PhaseTransitionCell {
    std::size_t nA = 0;
    std::size_t nB = 0;
    std::string strategy;
    std::size_t trials = 0;
    std::size_t successes = 0;
    std::size_t converged = 0;

    double rate() const {
        return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
    }
};

struct PhaseTransitionGrid {
    std::vector<PhaseTransitionCell> cells;  // strategy-major, then nA, then nB
};

struct SweepOptions {
    std::uint64_t masterSeed = 0;
    unsigned threads = 1;
    CoefficientSpec coeff;
    BpSolverConfig solver;
};

//! Success-rate grid over (nA, nB), one series per A-support strategy. Trial t
//! of cell (nA, nB) uses the same random stream in every series.
inline PhaseTransitionGrid run_recovery_sweep(const PartitionedDictionary& dict,
                                              const std::vector<std::size_t>& naRange,
                                              const std::vector<std::size_t>& nbRange,
                                              std::size_t trialsPerCell,
                                              const std::vector<SupportStrategy>& strategies,
                                              const SweepOptions& opt = {}) {
    require(!naRange.empty() && !nbRange.empty() && !strategies.empty(),
            "sweep ranges and strategy list must be non-empty");
    require(trialsPerCell >= 1, "need at least one trial per cell");
    for (auto a : naRange) require(a <= dict.sizeA(), "nA = " + std::to_string(a) + " exceeds Na");
    for (auto b : nbRange) require(b <= dict.sizeB(), "nB = " + std::to_string(b) + " exceeds Nb");

    PhaseTransitionGrid grid;
    struct Job {
        std::size_t cell;
        std::size_t trial;
    };
    std::vector<Job> jobs;
    for (const auto& strat : strategies)
        for (auto a : naRange)
            for (auto b : nbRange) {
                grid.cells.push_back({a, b, strategy_name(strat), trialsPerCell, 0, 0});
                for (std::size_t t = 0; t < trialsPerCell; ++t)
                    jobs.push_back({grid.cells.size() - 1, t});
            }
    const std::size_t perStrategy = naRange.size() * nbRange.size();
    std::vector<char> success(jobs.size(), 0), converged(jobs.size(), 0);
    parallel_for(jobs.size(), opt.threads, [&](std::size_t j) {
        const auto& job = jobs[j];
        const auto& cell = grid.cells[job.cell];
        const auto& strat = strategies[job.cell / perStrategy];
        Rng rng = make_stream(opt.masterSeed, (cell.nA << 32) | cell.nB, job.trial);
        HybridSupportSpec spec{choose_support_a(strat, dict.sizeA(), cell.nA, &rng), cell.nB};
        const auto trial = recovery_trial(dict, spec, opt.coeff, opt.solver, rng);
        success[j] = trial.success();
        converged[j] = trial.outcome.converged;
    });
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        grid.cells[jobs[j].cell].successes += static_cast<std::size_t>(success[j]);
        grid.cells[jobs[j].cell].converged += static_cast<std::size_t>(converged[j]);
    }
    return grid;
}

}  // namespace rsparse
