#pragma once
//! \file concentration.hpp
//! \brief Smallest singular value of sub-dictionaries S = [A' B'] and the
//! chain of norm/moment bounds that controls it.
//!
//! Notation: Xi_S = ||S^H S - I||, Xi_A = ||A'^H A' - I||, Xi_B = ||B'^H B' - I||,
//! Xi_X = ||A'^H B'||. Per sample, deterministically:
//!
//!   sigma_min(S)^2 >= 1 - Xi_S
//!   Xi_S <= max{Xi_A, Xi_B} + Xi_X <= Xi_A + Xi_B + Xi_X
//!   Xi_A <= (nA - 1) muA                      (Gershgorin)
//!   ||A'^H B||_{1,2} <= sqrt(mu^2 nA)         (entrywise coherence)
//!   Xi_X <= ||A|| ||B||                       (sub-multiplicativity)

#include "rsparse/model.hpp"
#include "rsparse/threshold.hpp"

#include <array>
#include <string_view>

namespace rsparse {

struct SubDictionary {
    IndexSet columnsA;  // into A
    IndexSet columnsB;  // into B
    ComplexMatrix S;    // A-columns first, then B-columns

    std::size_t nA() const { return columnsA.size(); }
    std::size_t nB() const { return columnsB.size(); }
};

inline SubDictionary extract_subdictionary(const PartitionedDictionary& dict, IndexSet columnsA,
                                           IndexSet columnsB) {
    require(!columnsA.empty() || !columnsB.empty(),
            "empty sub-dictionary has no smallest singular value");
    validate_index_set(columnsA, dict.sizeA(), "A-column");
    validate_index_set(columnsB, dict.sizeB(), "B-column");
    SubDictionary sub{std::move(columnsA), std::move(columnsB), {}};
    sub.S.resize(static_cast<Eigen::Index>(dict.rows()),
                 static_cast<Eigen::Index>(sub.nA() + sub.nB()));
    Eigen::Index k = 0;
    for (std::size_t j : sub.columnsA) sub.S.col(k++) = dict.matrix().col(static_cast<Eigen::Index>(j));
    for (std::size_t j : sub.columnsB)
        sub.S.col(k++) = dict.matrix().col(static_cast<Eigen::Index>(dict.sizeA() + j));
    return sub;
}

//! Smallest of the n = cols(S) singular values; 0 when n > rows(S) or when
//! below the rank tolerance 1e-10 sigma_max.
inline double sigma_min(const ComplexMatrix& S) {
    require(S.cols() >= 1, "sigma_min of an empty matrix");
    if (S.cols() > S.rows()) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(S);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    return smin <= 1e-10 * smax ? 0.0 : smin;
}

//! ||M^H M - I||.
inline double hollow_gram_norm(const ComplexMatrix& M) {
    if (M.cols() == 0) return 0.0;
    ComplexMatrix g = M.adjoint() * M;
    g.diagonal().array() -= 1.0;
    return hermitian_norm(g);
}

//! Max column l2 norm.
inline double norm_12(const ComplexMatrix& M) {
    if (M.size() == 0) return 0.0;
    return M.colwise().norm().maxCoeff();
}

struct ProofChainRecord {
    double sigmaMin = 0.0;
    double xiS = 0.0;
    double xiA = 0.0;
    double xiB = 0.0;
    double xiX = 0.0;
    double rowNormAB = 0.0;        // ||A'^H B||_{1,2} against all of B
    double gersgorinRhs = 0.0;     // (nA - 1) muA
    double coherenceRowBound = 0.0;  // sqrt(mu^2 nA)
    double normProduct = 0.0;      // ||A|| ||B||

    double max_block_bound() const { return std::max(xiA, xiB) + xiX; }
    double sum_bound() const { return xiA + xiB + xiX; }
};

//! The six per-sample inequalities, in the order of `kChainInequalityNames`.
inline constexpr std::array<std::string_view, 6> kChainInequalityNames = {
    "sigma_min^2 >= 1 - xiS", "xiS <= max(xiA,xiB) + xiX", "xiS <= xiA + xiB + xiX",
    "xiA <= (nA-1) muA",      "rowNormAB <= sqrt(mu^2 nA)", "xiX <= ||A|| ||B||"};

inline std::array<bool, 6> chain_violations(const ProofChainRecord& r, double slack = 1e-9) {
    return {r.sigmaMin * r.sigmaMin < 1.0 - r.xiS - slack,
            r.xiS > r.max_block_bound() + slack,
            r.xiS > r.sum_bound() + slack,
            r.xiA > r.gersgorinRhs + slack,
            r.rowNormAB > r.coherenceRowBound + slack,
            r.xiX > r.normProduct + slack};
}

//! A^H B for the whole dictionary, shared across trials so that
//! ||A'^H B||_{1,2} is a row selection instead of a product.
inline ComplexMatrix cross_gram(const PartitionedDictionary& dict) {
    return dict.a().adjoint() * dict.b();
}

inline ProofChainRecord proof_chain(const PartitionedDictionary& dict, const SubDictionary& sub,
                                    const DictionaryStats& st,
                                    const ComplexMatrix* crossGram = nullptr) {
    const auto na = static_cast<Eigen::Index>(sub.nA());
    const auto nb = static_cast<Eigen::Index>(sub.nB());
    const ComplexMatrix aSub = sub.S.leftCols(na);
    const ComplexMatrix bSub = sub.S.rightCols(nb);
    ProofChainRecord r;
    r.sigmaMin = sigma_min(sub.S);
    r.xiS = hollow_gram_norm(sub.S);
    r.xiA = hollow_gram_norm(aSub);
    r.xiB = hollow_gram_norm(bSub);
    r.xiX = (na > 0 && nb > 0) ? spectral_norm(aSub.adjoint() * bSub) : 0.0;
    if (na > 0 && dict.sizeB() > 0) {
        if (crossGram) {
            // column j of A'^H B has entries crossGram(a_i, j), i over A'
            Eigen::VectorXd colSq = Eigen::VectorXd::Zero(crossGram->cols());
            for (std::size_t i : sub.columnsA)
                colSq += crossGram->row(static_cast<Eigen::Index>(i)).cwiseAbs2().transpose();
            r.rowNormAB = std::sqrt(colSq.maxCoeff());
        } else {
            const auto bAll = dict.matrix().rightCols(static_cast<Eigen::Index>(dict.sizeB()));
            r.rowNormAB = norm_12(aSub.adjoint() * bAll);
        }
    }
    r.gersgorinRhs = na > 0 ? static_cast<double>(na - 1) * st.muA : 0.0;
    r.coherenceRowBound = std::sqrt(st.mu * st.mu * static_cast<double>(na));
    r.normProduct = st.specA * st.specB;
    return r;
}

// ---------------------------------------------------------------------------
// Moment-to-tail bound: if [E R^q]^{1/q} <= alpha sqrt(q) + beta for q >= Q,
// then P{R >= e^{1/4}(alpha u + beta)} <= e^{-u^2/4} for u >= sqrt(Q).

struct TailBoundSpec {
    double alpha = 0.0;
    double beta = 0.0;
    double Q1 = 4.0;
    double u = 0.0;  // sqrt(4 s log N)
    bool degenerate = false;  // nB = 0
};

//! alpha = 6 sqrt(muB^2 nB) + 3 sqrt(mu^2 nA / 2),
//! beta = (nA - 1) muA + 2 nB ||B||^2 / Nb + sqrt(nB / Nb) ||A|| ||B||,
//! Q1 = max{4 log(nB/2 + 1), 4 log nB, 4}. The muA term is dropped at nA = 0.
inline TailBoundSpec alpha_beta(const DictionaryStats& st, std::size_t nA, std::size_t nB,
                                double s = 1.0) {
    require(s >= 1.0, "s must be >= 1");
    detail::require_theorem_domain(st.N);
    const auto na = static_cast<double>(nA);
    const auto nb = static_cast<double>(nB);
    TailBoundSpec t;
    t.alpha = 6.0 * std::sqrt(st.muB * st.muB * nb) + 3.0 * std::sqrt(st.mu * st.mu * na / 2.0);
    t.beta = nA > 0 ? (na - 1.0) * st.muA : 0.0;
    if (nB == 0) {
        t.degenerate = true;
        t.Q1 = 4.0;
    } else {
        require(st.Nb >= 1, "nB > 0 needs a non-empty B");
        const auto Nb = static_cast<double>(st.Nb);
        t.beta += 2.0 * nb * st.specB * st.specB / Nb + std::sqrt(nb / Nb) * st.specA * st.specB;
        t.Q1 = std::max({4.0 * std::log(nb / 2.0 + 1.0), 4.0 * std::log(nb), 4.0});
    }
    t.u = std::sqrt(4.0 * s * std::log(static_cast<double>(st.N)));
    return t;
}

struct TailProbability {
    double threshold = 0.0;
    double bound = 0.0;
};

inline TailProbability tail_probability(double u, const TailBoundSpec& spec) {
    require(u >= std::sqrt(spec.Q1), "tail bound needs u >= sqrt(Q1) = " +
                                         std::to_string(std::sqrt(spec.Q1)));
    return {std::exp(0.25) * (spec.alpha * u + spec.beta), std::exp(-u * u / 4.0)};
}

//! Whether some gamma in [0, 1] satisfies the conditions on A and B together,
//! i.e. lhsA + lhsB <= e^{-1/4}; returns the smallest such gamma.
inline std::optional<double> feasible_gamma(const DictionaryStats& st, std::size_t nA,
                                            std::size_t nB, double s) {
    const double c = std::exp(-0.25);
    TheoremParams p{s, 0.0, nA, nB};
    const double lhsA = check_cond_a(st.mu, st.muA, st.N, p).lhs;
    const double lhsB = check_cond_b(st.muB, st.specA, st.specB, st.Nb, st.N, p).lhs;
    if (lhsA + lhsB > c) return std::nullopt;
    return lhsB / c;
}

// ---------------------------------------------------------------------------
// Monte Carlo over random B-columns.

struct SminTrial {
    std::size_t trialIndex = 0;
    ProofChainRecord chain;
};

struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::size_t> counts;
};

inline Histogram make_histogram(const std::vector<double>& values, double lo, double hi,
                                std::size_t bins) {
    Histogram h{lo, hi, std::vector<std::size_t>(bins, 0)};
    for (double v : values) {
        auto k = static_cast<std::ptrdiff_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
        k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(bins) - 1);
        ++h.counts[static_cast<std::size_t>(k)];
    }
    return h;
}

struct SminExperimentResult {
    std::size_t nA = 0;
    std::size_t nB = 0;
    double s = 1.0;
    std::uint64_t masterSeed = 0;
    std::string strategy;
    std::vector<SminTrial> trials;
    std::size_t failures = 0;          // sigma_min <= 1/sqrt(2)
    double empiricalFailureRate = 0.0;
    double lemma1Bound = 0.0;          // N^{-s}
    bool conditionsHold = false;       // A and B conditions for some gamma
    std::optional<double> gamma;
    bool boundRespected = true;        // vacuous unless conditionsHold
    std::array<std::size_t, 6> violations{};
    Histogram histogram;
};

struct SminOptions {
    double s = 1.0;
    std::uint64_t masterSeed = 0;
    unsigned threads = 1;
    std::size_t histogramBins = 20;
};

inline SminExperimentResult run_smin_trials(const PartitionedDictionary& dict,
                                            const DictionaryStats& st,
                                            const SupportStrategy& strat, std::size_t nA,
                                            std::size_t nB, std::size_t trials,
                                            const SminOptions& opt = {}) {
    require(trials >= 1, "need at least one trial");
    require(nA + nB >= 1, "sub-dictionary must have at least one column");
    SminExperimentResult res;
    res.nA = nA;
    res.nB = nB;
    res.s = opt.s;
    res.masterSeed = opt.masterSeed;
    res.strategy = strategy_name(strat);
    res.trials.resize(trials);
    const bool randomA = std::holds_alternative<strategy::RandomBaseline>(strat);
    const IndexSet fixedA = randomA ? IndexSet{} : choose_support_a(strat, dict.sizeA(), nA);
    const ComplexMatrix crossG = cross_gram(dict);
    parallel_for(trials, opt.threads, [&](std::size_t t) {
        Rng rng = make_stream(opt.masterSeed, t);
        IndexSet colsA = randomA ? choose_support_a(strat, dict.sizeA(), nA, &rng) : fixedA;
        IndexSet colsB = sample_support_b(dict.sizeB(), nB, rng);
        const auto sub = extract_subdictionary(dict, std::move(colsA), std::move(colsB));
        res.trials[t] = {t, proof_chain(dict, sub, st, &crossG)};
    });
    std::vector<double> sigmas;
    double hi = 1.0;
    for (const auto& tr : res.trials) {
        if (tr.chain.sigmaMin <= 1.0 / std::sqrt(2.0)) ++res.failures;
        const auto v = chain_violations(tr.chain);
        for (std::size_t k = 0; k < v.size(); ++k) res.violations[k] += v[k];
        sigmas.push_back(tr.chain.sigmaMin);
        hi = std::max(hi, tr.chain.sigmaMin);
    }
    res.empiricalFailureRate = static_cast<double>(res.failures) / static_cast<double>(trials);
    res.lemma1Bound = std::pow(static_cast<double>(st.N), -opt.s);
    res.gamma = feasible_gamma(st, nA, nB, opt.s);
    res.conditionsHold = res.gamma.has_value();
    res.boundRespected = !res.conditionsHold || res.empiricalFailureRate <= res.lemma1Bound;
    res.histogram = make_histogram(sigmas, 0.0, hi, opt.histogramBins);
    return res;
}

struct MomentEstimate {
    double estimate = 0.0;   // (mean R^q)^{1/q}
    double lower95 = 0.0;    // bootstrap percentile interval
    double upper95 = 0.0;
    double bound = 0.0;
    bool boundValid = true;  // q meets the bound's validity floor
};

struct MomentResult {
    std::size_t nA = 0;
    std::size_t nB = 0;
    double q = 0.0;
    std::size_t trials = 0;
    MomentEstimate xiB;  // [E Xi_B^q]^{1/q} <= 6 sqrt(muB^2 nB) sqrt(q) + 2 nB ||B||^2 / Nb
    MomentEstimate xiX;  // [E Xi_X^q]^{1/q} <= 3/sqrt(2) sqrt(mu^2 nA) sqrt(q) + sqrt(nB/Nb) ||A|| ||B||
    std::vector<double> xiBSamples;
    std::vector<double> xiXSamples;
};

struct MomentOptions {
    std::uint64_t masterSeed = 0;
    unsigned threads = 1;
    std::size_t bootstrapResamples = 1000;
};

namespace detail {

inline MomentEstimate moment_with_bootstrap(const std::vector<double>& samples, double q,
                                            std::size_t resamples, std::uint64_t seed) {
    std::vector<double> powered(samples.size());
    std::transform(samples.begin(), samples.end(), powered.begin(),
                   [q](double v) { return std::pow(v, q); });
    const auto n = powered.size();
    const auto moment = [&](double meanPow) { return std::pow(meanPow, 1.0 / q); };
    MomentEstimate est;
    est.estimate = moment(std::accumulate(powered.begin(), powered.end(), 0.0) /
                          static_cast<double>(n));
    std::vector<double> boot(resamples);
    Rng rng(stream_seed(seed, 0xb007));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (auto& b : boot) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += powered[pick(rng)];
        b = moment(acc / static_cast<double>(n));
    }
    std::sort(boot.begin(), boot.end());
    const auto at = [&](double frac) {
        const auto k = static_cast<std::size_t>(std::floor(frac * static_cast<double>(resamples - 1)));
        return boot[k];
    };
    est.lower95 = resamples ? at(0.025) : est.estimate;
    est.upper95 = resamples ? std::max(at(0.975), est.estimate) : est.estimate;
    return est;
}

}  // namespace detail

//! Validity floor for the Xi_B moment bound: max{4 log(nB/2 + 1), 4}.
inline double moment_q_floor(std::size_t nB) {
    return std::max(4.0 * std::log(static_cast<double>(nB) / 2.0 + 1.0), 4.0);
}

inline MomentResult estimate_moment(const PartitionedDictionary& dict, const DictionaryStats& st,
                                    const SupportStrategy& strat, std::size_t nA, std::size_t nB,
                                    double q, std::size_t trials, const MomentOptions& opt = {}) {
    require(q >= moment_q_floor(nB), "q = " + std::to_string(q) +
                                         " is below the validity floor " +
                                         std::to_string(moment_q_floor(nB)));
    require(trials >= 1000, "moment estimation needs at least 1000 trials");
    require(nB >= 1 && st.Nb >= 1, "moment estimation needs nB >= 1");
    require(nA + nB >= 1, "sub-dictionary must have at least one column");
    MomentResult res;
    res.nA = nA;
    res.nB = nB;
    res.q = q;
    res.trials = trials;
    res.xiBSamples.resize(trials);
    res.xiXSamples.resize(trials);
    const bool randomA = std::holds_alternative<strategy::RandomBaseline>(strat);
    const IndexSet fixedA = randomA ? IndexSet{} : choose_support_a(strat, dict.sizeA(), nA);
    parallel_for(trials, opt.threads, [&](std::size_t t) {
        Rng rng = make_stream(opt.masterSeed, t);
        IndexSet colsA = randomA ? choose_support_a(strat, dict.sizeA(), nA, &rng) : fixedA;
        IndexSet colsB = sample_support_b(dict.sizeB(), nB, rng);
        const auto sub = extract_subdictionary(dict, std::move(colsA), std::move(colsB));
        const auto na = static_cast<Eigen::Index>(sub.nA());
        const ComplexMatrix bSub = sub.S.rightCols(static_cast<Eigen::Index>(sub.nB()));
        res.xiBSamples[t] = hollow_gram_norm(bSub);
        res.xiXSamples[t] = na > 0 ? spectral_norm(sub.S.leftCols(na).adjoint() * bSub) : 0.0;
    });
    const auto na = static_cast<double>(nA);
    const auto nb = static_cast<double>(nB);
    const auto Nb = static_cast<double>(st.Nb);
    res.xiB = detail::moment_with_bootstrap(res.xiBSamples, q, opt.bootstrapResamples,
                                            stream_seed(opt.masterSeed, 1));
    res.xiB.bound = 6.0 * std::sqrt(st.muB * st.muB * nb) * std::sqrt(q) +
                    2.0 * nb * st.specB * st.specB / Nb;
    res.xiX = detail::moment_with_bootstrap(res.xiXSamples, q, opt.bootstrapResamples,
                                            stream_seed(opt.masterSeed, 2));
    res.xiX.bound = 3.0 / std::sqrt(2.0) * std::sqrt(st.mu * st.mu * na) * std::sqrt(q) +
                    std::sqrt(nb / Nb) * st.specA * st.specB;
    res.xiX.boundValid = q >= std::max(4.0 * std::log(nb), 4.0);
    return res;
}

}  // namespace rsparse
