#pragma once
//! \file model.hpp
//! \brief Hybrid sparse model: arbitrary support on A, uniformly random support
//! on B, continuous magnitudes with i.i.d. uniform phases.

#include "rsparse/dictionary.hpp"

#include <numeric>
#include <set>
#include <string_view>
#include <variant>

namespace rsparse {

//! Uniformly random cardinality-nB subset of {0..Nb-1}, sorted ascending.
inline IndexSet sample_support_b(std::size_t Nb, std::size_t nB, Rng& rng) {
    require(nB <= Nb, "cannot draw " + std::to_string(nB) + " of " + std::to_string(Nb) +
                          " columns of B");
    // Partial Fisher-Yates: the first nB slots are a uniform nB-subset.
    IndexSet pool(Nb);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < nB; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, Nb - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(nB);
    std::sort(pool.begin(), pool.end());
    return pool;
}

namespace strategy {
struct FirstN {};
struct Spread {};
struct Prescribed {
    IndexSet indices;
};
struct RandomBaseline {
    std::uint64_t seed = 0;
};
}  // namespace strategy

//! How the A-part of the support is picked. Only RandomBaseline is random;
//! the others are fixed ("arbitrary") patterns.
using SupportStrategy = std::variant<strategy::FirstN, strategy::Spread, strategy::Prescribed,
                                     strategy::RandomBaseline>;

inline std::string strategy_name(const SupportStrategy& s) {
    switch (s.index()) {
        case 0: return "first-n";
        case 1: return "spread";
        case 2: return "prescribed";
        default: return "random-baseline";
    }
}

inline SupportStrategy parse_strategy(std::string_view name, std::uint64_t seed = 0) {
    if (name == "first-n") return strategy::FirstN{};
    if (name == "spread") return strategy::Spread{};
    if (name == "random-baseline" || name == "random") return strategy::RandomBaseline{seed};
    throw Error("unknown support strategy '" + std::string(name) +
                "' (expected first-n, spread, random-baseline)");
}

inline void validate_index_set(const IndexSet& idx, std::size_t bound, const std::string& what) {
    std::set<std::size_t> seen;
    for (std::size_t i : idx) {
        require(i < bound, what + " index " + std::to_string(i) + " out of range [0, " +
                               std::to_string(bound) + ")");
        require(seen.insert(i).second, what + " index " + std::to_string(i) + " is duplicated");
    }
}

//! A-support of cardinality nA per strategy. RandomBaseline draws from
//! `rng` when given, else from its own seed.
inline IndexSet choose_support_a(const SupportStrategy& strat, std::size_t Na, std::size_t nA,
                                 Rng* rng = nullptr) {
    require(nA <= Na, "cannot pick " + std::to_string(nA) + " of " + std::to_string(Na) +
                          " columns of A");
    IndexSet out;
    if (std::holds_alternative<strategy::FirstN>(strat)) {
        out.resize(nA);
        std::iota(out.begin(), out.end(), std::size_t{0});
    } else if (std::holds_alternative<strategy::Spread>(strat)) {
        for (std::size_t i = 0; i < nA; ++i) out.push_back(i * Na / nA);
    } else if (const auto* p = std::get_if<strategy::Prescribed>(&strat)) {
        require(p->indices.size() == nA, "prescribed support has " +
                                             std::to_string(p->indices.size()) +
                                             " indices, expected " + std::to_string(nA));
        validate_index_set(p->indices, Na, "prescribed A-support");
        out = p->indices;
    } else {
        Rng own(stream_seed(std::get<strategy::RandomBaseline>(strat).seed, 0xa5));
        out = sample_support_b(Na, nA, rng ? *rng : own);
    }
    return out;
}

enum class MagnitudeLaw { Unit, HalfNormalModulus, Uniform };

inline std::string magnitude_law_name(MagnitudeLaw law) {
    switch (law) {
        case MagnitudeLaw::Unit: return "unit";
        case MagnitudeLaw::Uniform: return "uniform";
        default: return "half-normal-modulus";
    }
}

inline MagnitudeLaw parse_magnitude_law(std::string_view name) {
    if (name == "unit") return MagnitudeLaw::Unit;
    if (name == "uniform") return MagnitudeLaw::Uniform;
    if (name == "half-normal-modulus" || name == "gaussian") return MagnitudeLaw::HalfNormalModulus;
    throw Error("unknown magnitude law '" + std::string(name) + "'");
}

//! Phases are always i.i.d. uniform on [0, 2 pi).
struct CoefficientSpec {
    MagnitudeLaw magnitudeLaw = MagnitudeLaw::HalfNormalModulus;

    //! `unit` is not a continuous law.
    bool continuous() const { return magnitudeLaw != MagnitudeLaw::Unit; }
};

struct HybridSupportSpec {
    IndexSet supportA;
    std::size_t nB = 0;

    std::size_t nA() const { return supportA.size(); }
};

struct SparseInstance {
    IndexSet support;        // global column indices, A part then B part
    std::vector<Complex> values;
    ComplexVector x;
    ComplexVector y;
};

inline double sample_magnitude(MagnitudeLaw law, Rng& rng) {
    switch (law) {
        case MagnitudeLaw::Unit: return 1.0;
        case MagnitudeLaw::Uniform: return 1.0 - uniform01(rng);  // (0, 1]
        default: {
            std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
            const double re = normal(rng), im = normal(rng);
            return std::hypot(re, im);
        }
    }
}

inline Complex sample_coefficient(const CoefficientSpec& coeff, Rng& rng) {
    const double mag = sample_magnitude(coeff.magnitudeLaw, rng);
    const double phase = 2.0 * kPi * uniform01(rng);
    return std::polar(mag, phase);
}

inline SparseInstance sample_instance(const PartitionedDictionary& dict,
                                      const HybridSupportSpec& spec,
                                      const CoefficientSpec& coeff, Rng& rng) {
    validate_index_set(spec.supportA, dict.sizeA(), "A-support");
    const IndexSet suppB = sample_support_b(dict.sizeB(), spec.nB, rng);
    SparseInstance inst;
    inst.support = spec.supportA;
    for (std::size_t j : suppB) inst.support.push_back(dict.sizeA() + j);
    inst.x = ComplexVector::Zero(static_cast<Eigen::Index>(dict.cols()));
    for (std::size_t j : inst.support) {
        const Complex v = sample_coefficient(coeff, rng);
        inst.values.push_back(v);
        inst.x(static_cast<Eigen::Index>(j)) = v;
    }
    inst.y = dict.matrix() * inst.x;
    return inst;
}

}  // namespace rsparse
