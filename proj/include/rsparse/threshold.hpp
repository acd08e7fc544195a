#pragma once
//! \file threshold.hpp
//! \brief Closed-form sparsity conditions: the classical coherence threshold,
//! the two-ONB conditions, the general [A B] conditions on the A- and
//! B-cardinalities, the l0/l1 total-sparsity conditions, and the dimensionless
//! scaling ratios.
//!
//! Logarithms are natural throughout.

#include "rsparse/dictionary.hpp"

#include <limits>
#include <string>
#include <vector>

namespace rsparse {

//! Default lower value of the two-ONB constant c.
inline constexpr double kTwoOnbConstant = 0.004212;

struct TheoremParams {
    double s = 1.0;
    double gamma = 0.5;
    std::size_t nA = 0;
    std::size_t nB = 0;

    std::size_t total() const { return nA + nB; }

    void validate() const {
        require(s >= 1.0, "s must be >= 1");
        require(gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0, 1]");
    }
};

enum class ConditionId { TwoOnbUnique, TwoOnbRecover, CondA, CondB, TotalUnique, TotalRecover, Classical };

inline std::string condition_name(ConditionId id) {
    switch (id) {
        case ConditionId::TwoOnbUnique: return "two_onb_unique";
        case ConditionId::TwoOnbRecover: return "two_onb_recover";
        case ConditionId::CondA: return "cond_a";
        case ConditionId::CondB: return "cond_b";
        case ConditionId::TotalUnique: return "total_unique";
        case ConditionId::TotalRecover: return "total_recover";
        default: return "classical";
    }
}

//! One inequality lhs < rhs (strict) or lhs <= rhs.
struct Condition {
    ConditionId id = ConditionId::Classical;
    double lhs = 0.0;
    double rhs = 0.0;
    bool strict = false;
    bool satisfied = false;
    std::string note;

    double margin() const { return rhs - lhs; }
};

inline Condition make_condition(ConditionId id, double lhs, double rhs, bool strict,
                                std::string note = {}) {
    return {id, lhs, rhs, strict, strict ? lhs < rhs : lhs <= rhs, std::move(note)};
}

struct ConditionReport {
    std::vector<Condition> conditions;
    bool p0Premise = false;    // unique (P0) solution premise holds
    bool p0p1Premise = false;  // unique (P0) and (P1) solution premise holds
    std::vector<std::string> notes;

    const Condition* find(ConditionId id) const {
        for (const auto& c : conditions)
            if (c.id == id) return &c;
        return nullptr;
    }
    bool all_satisfied() const {
        for (const auto& c : conditions)
            if (c.id != ConditionId::Classical && !c.satisfied) return false;
        return true;
    }
};

struct ClassicalThreshold {
    double value = 0.0;
    bool unbounded = false;  // mu = 0: every representation is unique
};

//! (1 + 1/mu) / 2.
inline ClassicalThreshold classical_threshold(double mu) {
    require(mu >= 0.0, "coherence must be non-negative");
    if (mu == 0.0) return {std::numeric_limits<double>::infinity(), true};
    return {(1.0 + 1.0 / mu) / 2.0, false};
}

namespace detail {
inline void require_theorem_domain(std::size_t N) {
    require(N > 2, "the sparsity theorems assume N > 2 (got N = " + std::to_string(N) + ")");
}
}  // namespace detail

//! Two-ONB conditions: n < min{c mu^-2 / (s log N), mu^-2 / 2} and
//! n <= mu^-2 / (8 (s+1) log N), with n = nA + nB.
inline ConditionReport check_theorem1(double mu, std::size_t N, const TheoremParams& p,
                                      double c = kTwoOnbConstant) {
    detail::require_theorem_domain(N);
    require(mu > 0.0, "check_theorem1 requires mu > 0");
    p.validate();
    const double logN = std::log(static_cast<double>(N));
    const double inv2 = 1.0 / (mu * mu);
    const auto n = static_cast<double>(p.total());
    ConditionReport r;
    r.conditions.push_back(make_condition(ConditionId::TwoOnbUnique, n,
                                          std::min(c * inv2 / (p.s * logN), inv2 / 2.0), true));
    r.conditions.push_back(
        make_condition(ConditionId::TwoOnbRecover, n, inv2 / (8.0 * (p.s + 1.0) * logN), false));
    r.p0Premise = r.conditions[0].satisfied;
    r.p0p1Premise = r.p0Premise && r.conditions[1].satisfied;
    return r;
}

//! 6 sqrt(2) sqrt(nA mu^2 s log N) + 2 (nA - 1) muA <= (1 - gamma) e^{-1/4}.
//! nA = 0 is taken as trivially satisfied with lhs 0.
inline Condition check_cond_a(double mu, double muA, std::size_t N, const TheoremParams& p) {
    detail::require_theorem_domain(N);
    p.validate();
    const double rhs = (1.0 - p.gamma) * std::exp(-0.25);
    if (p.nA == 0)
        return make_condition(ConditionId::CondA, 0.0, rhs, false,
                              "nA = 0: no A-columns, condition taken as satisfied");
    const double logN = std::log(static_cast<double>(N));
    const auto nA = static_cast<double>(p.nA);
    const double lhs =
        6.0 * std::sqrt(2.0) * std::sqrt(nA * mu * mu * p.s * logN) + 2.0 * (nA - 1.0) * muA;
    return make_condition(ConditionId::CondA, lhs, rhs, false);
}

//! 24 sqrt(nB muB^2 s log N) + 4 nB ||B||^2 / Nb + 2 sqrt(nB / Nb) ||A|| ||B||
//! <= gamma e^{-1/4}.
inline Condition check_cond_b(double muB, double specA, double specB, std::size_t Nb,
                              std::size_t N, const TheoremParams& p) {
    detail::require_theorem_domain(N);
    p.validate();
    const double rhs = p.gamma * std::exp(-0.25);
    if (p.nB == 0) return make_condition(ConditionId::CondB, 0.0, rhs, false);
    require(Nb >= 1, "condition on B needs Nb >= 1");
    const double logN = std::log(static_cast<double>(N));
    const auto nB = static_cast<double>(p.nB);
    const auto nb = static_cast<double>(Nb);
    const double lhs = 24.0 * std::sqrt(nB * muB * muB * p.s * logN) +
                       4.0 * nB * specB * specB / nb + 2.0 * std::sqrt(nB / nb) * specA * specB;
    return make_condition(ConditionId::CondB, lhs, rhs, false);
}

struct L0L1Conditions {
    Condition unique;   // nA + nB < mu^-2 / 2
    Condition recover;  // nA + nB <= mu^-2 / (8 (s+1) log N)
};

//! nA + nB < mu^-2 / 2 (strict) and nA + nB <= mu^-2 / (8 (s+1) log N).
inline L0L1Conditions check_l0_l1(double mu, std::size_t N, const TheoremParams& p) {
    detail::require_theorem_domain(N);
    require(mu > 0.0, "check_l0_l1 requires mu > 0");
    p.validate();
    const double logN = std::log(static_cast<double>(N));
    const double inv2 = 1.0 / (mu * mu);
    const auto n = static_cast<double>(p.total());
    return {make_condition(ConditionId::TotalUnique, n, inv2 / 2.0, true),
            make_condition(ConditionId::TotalRecover, n, inv2 / (8.0 * (p.s + 1.0) * logN), false)};
}

//! Full report for D = [A B]: conditions on A and B, the two total-sparsity
//! conditions, and the classical threshold for reference.
inline ConditionReport check_theorem2(const DictionaryStats& st, const TheoremParams& p) {
    detail::require_theorem_domain(st.N);
    p.validate();
    ConditionReport r;
    r.conditions.push_back(check_cond_a(st.mu, st.muA, st.N, p));
    r.conditions.push_back(check_cond_b(st.muB, st.specA, st.specB, st.Nb, st.N, p));
    if (st.mu > 0.0) {
        const auto l01 = check_l0_l1(st.mu, st.N, p);
        r.conditions.push_back(l01.unique);
        r.conditions.push_back(l01.recover);
    } else {
        const double inf = std::numeric_limits<double>::infinity();
        const auto n = static_cast<double>(p.total());
        r.conditions.push_back(make_condition(ConditionId::TotalUnique, n, inf, true, "mu = 0"));
        r.conditions.push_back(make_condition(ConditionId::TotalRecover, n, inf, false, "mu = 0"));
    }
    const auto ct = classical_threshold(st.mu);
    r.conditions.push_back(make_condition(ConditionId::Classical,
                                          static_cast<double>(p.total()), ct.value, true,
                                          "reference only, not part of the premises"));
    r.p0Premise = r.conditions[0].satisfied && r.conditions[1].satisfied &&
                  r.conditions[2].satisfied;
    r.p0p1Premise = r.p0Premise && r.conditions[3].satisfied;
    if (p.nA > st.Na) r.notes.push_back("nA exceeds the number of A-columns");
    if (p.nB > st.Nb) r.notes.push_back("nB exceeds the number of B-columns");
    if (p.nA == 0) r.notes.push_back(r.conditions[0].note);
    return r;
}

inline nlohmann::json to_json(const Condition& c) {
    return {{"id", condition_name(c.id)}, {"lhs", c.lhs},          {"rhs", c.rhs},
            {"margin", c.margin()},       {"strict", c.strict},     {"satisfied", c.satisfied},
            {"note", c.note}};
}

inline nlohmann::json to_json(const ConditionReport& r) {
    nlohmann::json conds = nlohmann::json::array();
    for (const auto& c : r.conditions) {
        auto j = to_json(c);
        // JSON has no infinity; an unbounded classical threshold becomes null.
        if (!std::isfinite(c.rhs)) j["rhs"] = nullptr, j["margin"] = nullptr;
        conds.push_back(std::move(j));
    }
    return {{"conditions", conds},
            {"p0_premise", r.p0Premise},
            {"p0_p1_premise", r.p0p1Premise},
            {"notes", r.notes}};
}

// ---------------------------------------------------------------------------
// Maximal sparsity subject to the conditions on A and B and both total-sparsity
// conditions.

inline std::vector<double> default_gamma_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 20; ++i) g.push_back(i / 20.0);
    return g;
}

struct SparsityPoint {
    std::size_t nA = 0;
    std::size_t nB = 0;
    double gamma = 0.0;

    std::size_t total() const { return nA + nB; }
    bool operator==(const SparsityPoint&) const = default;
};

struct SearchLimits {
    std::size_t nAMax;
    std::size_t nBMax;
};

namespace detail {

//! Largest n in [0, hi] with pred(n), for pred true at 0 and monotone
//! (true on a prefix).
template <typename Pred>
std::size_t last_true(std::size_t hi, Pred&& pred) {
    std::size_t lo = 0;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (pred(mid)) lo = mid;
        else hi = mid - 1;
    }
    return lo;
}

//! Largest total n with the total-sparsity conditions satisfied.
inline std::size_t total_cap(const DictionaryStats& st, double s) {
    if (st.mu == 0.0) return std::numeric_limits<std::size_t>::max();
    const double logN = std::log(static_cast<double>(st.N));
    const double inv2 = 1.0 / (st.mu * st.mu);
    const double recoverCap = inv2 / (8.0 * (s + 1.0) * logN);
    const double uniqueCap = inv2 / 2.0;
    // nA + nB <= floor(recoverCap) and nA + nB < uniqueCap.
    double cap = std::floor(recoverCap);
    double strictCap = std::ceil(uniqueCap) - 1.0;
    cap = std::min(cap, strictCap);
    if (cap < 0.0) return 0;
    return static_cast<std::size_t>(std::min(cap, 1e15));
}

}  // namespace detail

//! Lexicographically largest feasible (nA + nB, nA) at a fixed gamma. The
//! left-hand sides on A and B are nondecreasing in nA and nB, so each
//! admissible range is a prefix found by bisection.
inline SparsityPoint max_sparsity_at_gamma(const DictionaryStats& st, double s, double gamma,
                                           SearchLimits limits) {
    detail::require_theorem_domain(st.N);
    TheoremParams p{s, gamma, 0, 0};
    p.validate();
    const auto okA = [&](std::size_t nA) {
        p.nA = nA;
        return check_cond_a(st.mu, st.muA, st.N, p).satisfied;
    };
    const auto okB = [&](std::size_t nB) {
        p.nB = nB;
        return check_cond_b(st.muB, st.specA, st.specB, st.Nb, st.N, p).satisfied;
    };
    const std::size_t aMax = detail::last_true(limits.nAMax, okA);
    const std::size_t bMax = detail::last_true(limits.nBMax, okB);
    const std::size_t total = std::min(aMax + bMax, detail::total_cap(st, s));
    const std::size_t nA = std::min(aMax, total);
    return {nA, total - nA, gamma};
}

struct SparsitySearchResult {
    SparsityPoint best;
    std::vector<SparsityPoint> perGamma;
    ConditionReport report;  // re-validation of `best`
};

//! Best point over a gamma grid; ties keep the first gamma reached.
inline SparsitySearchResult max_sparsity_search(const DictionaryStats& st, double s,
                                                const std::vector<double>& gammaGrid,
                                                std::optional<SearchLimits> limits = {}) {
    require(!gammaGrid.empty(), "gamma grid must be non-empty");
    const SearchLimits lim = limits.value_or(SearchLimits{st.Na, st.Nb});
    require(lim.nAMax <= st.Na && lim.nBMax <= st.Nb, "search limits exceed block sizes");
    SparsitySearchResult out;
    for (double g : gammaGrid) {
        const SparsityPoint pt = max_sparsity_at_gamma(st, s, g, lim);
        const bool better = out.perGamma.empty() || pt.total() > out.best.total() ||
                            (pt.total() == out.best.total() && pt.nA > out.best.nA);
        if (better) out.best = pt;
        out.perGamma.push_back(pt);
    }
    out.report = check_theorem2(st, {s, out.best.gamma, out.best.nA, out.best.nB});
    return out;
}

// ---------------------------------------------------------------------------

//! Dimensionless ratios whose boundedness as m grows corresponds to the
//! asymptotic requirements on D, A and B.
struct ScalingReport {
    double r1 = 0.0;  // mu sqrt(m)
    double r2 = 0.0;  // muA m / log N
    double r3 = 0.0;  // Na log N / m
    double r4 = 0.0;  // ||B||^2 m / (Nb log N)
    double r5 = 0.0;  // ||A||^2 ||B||^2 m / (Nb log N)
};

inline ScalingReport scaling_report(const DictionaryStats& st) {
    detail::require_theorem_domain(st.N);
    const double m = static_cast<double>(st.m);
    const double logN = std::log(static_cast<double>(st.N));
    ScalingReport r;
    r.r1 = st.mu * std::sqrt(m);
    r.r2 = st.muA * m / logN;
    r.r3 = static_cast<double>(st.Na) * logN / m;
    if (st.Nb > 0) {
        const double nb = static_cast<double>(st.Nb);
        r.r4 = st.specB * st.specB * m / (nb * logN);
        r.r5 = st.specA * st.specA * st.specB * st.specB * m / (nb * logN);
    }
    return r;
}

inline nlohmann::json to_json(const ScalingReport& r) {
    return {{"r1_mu_sqrt_m", r.r1},
            {"r2_muA_m_over_logN", r.r2},
            {"r3_Na_logN_over_m", r.r3},
            {"r4_B2_m_over_Nb_logN", r.r4},
            {"r5_A2B2_m_over_Nb_logN", r.r5}};
}

}  // namespace rsparse
