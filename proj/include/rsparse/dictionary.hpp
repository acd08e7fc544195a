#pragma once
//! \file dictionary.hpp
//! \brief Partitioned dictionaries D = [A B]: construction, coherence and
//! spectral statistics, and the `.dict.json` file format.

#include "rsparse/core.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace rsparse {

//! An m x N dictionary with unit-norm columns, split after column Na into
//! the sub-dictionaries A (first Na columns) and B (the rest).
class PartitionedDictionary {
public:
    static constexpr double kUnitTolerance = 1e-10;

    PartitionedDictionary(ComplexMatrix matrix, std::size_t split,
                          double unitTolerance = kUnitTolerance)
        : matrix_(std::move(matrix)), split_(split) {
        require(matrix_.rows() >= 1 && matrix_.cols() >= 1, "dictionary must be non-empty");
        require(split_ <= cols(), "split Na = " + std::to_string(split_) +
                                      " exceeds column count N = " + std::to_string(cols()));
        require(matrix_.allFinite(), "dictionary has non-finite entries");
        for (Eigen::Index j = 0; j < matrix_.cols(); ++j) {
            const double n = matrix_.col(j).norm();
            if (std::abs(n - 1.0) > unitTolerance)
                throw Error("column " + std::to_string(j) + " has norm " + std::to_string(n) +
                            ", expected 1");
        }
    }

    const ComplexMatrix& matrix() const { return matrix_; }
    std::size_t rows() const { return static_cast<std::size_t>(matrix_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(matrix_.cols()); }
    std::size_t split() const { return split_; }
    std::size_t sizeA() const { return split_; }
    std::size_t sizeB() const { return cols() - split_; }

    ComplexMatrix a() const { return matrix_.leftCols(static_cast<Eigen::Index>(sizeA())); }
    ComplexMatrix b() const { return matrix_.rightCols(static_cast<Eigen::Index>(sizeB())); }

    PartitionedDictionary with_split(std::size_t split) const {
        return PartitionedDictionary(matrix_, split);
    }

private:
    ComplexMatrix matrix_;
    std::size_t split_;
};

struct DictionaryStats {
    std::size_t m = 0;
    std::size_t N = 0;
    std::size_t Na = 0;
    std::size_t Nb = 0;
    double mu = 0.0;
    double muA = 0.0;
    double muB = 0.0;
    double specA = 0.0;
    double specB = 0.0;
    double specD = 0.0;
    double welch = 0.0;
    double tightDevA = 0.0;
    double tightDevB = 0.0;
    // Set when a block has fewer than two columns; its coherence is reported as 0.
    bool muAUndefined = false;
    bool muBUndefined = false;

    bool operator==(const DictionaryStats&) const = default;
};

namespace detail {

inline double max_offdiagonal_modulus(const ComplexMatrix& gram) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < gram.cols(); ++j)
        for (Eigen::Index i = 0; i < gram.rows(); ++i)
            if (i != j) best = std::max(best, std::abs(gram(i, j)));
    return best;
}

inline bool is_odd_prime(std::size_t p) {
    if (p < 3 || p % 2 == 0) return false;
    for (std::size_t d = 3; d * d <= p; d += 2)
        if (p % d == 0) return false;
    return true;
}

}  // namespace detail

//! max_{i != j} |d_i^H d_j|. Undefined (throws) for fewer than two columns.
inline double coherence(const ComplexMatrix& m) {
    require(m.cols() >= 2, "coherence is undefined for fewer than 2 columns");
    return detail::max_offdiagonal_modulus(m.adjoint() * m);
}

//! max_{i,j} |a_i^H b_j|.
inline double cross_coherence(const ComplexMatrix& a, const ComplexMatrix& b) {
    require(a.rows() == b.rows(), "cross_coherence: row counts differ (" +
                                      std::to_string(a.rows()) + " vs " +
                                      std::to_string(b.rows()) + ")");
    if (a.cols() == 0 || b.cols() == 0) return 0.0;
    return (a.adjoint() * b).cwiseAbs().maxCoeff();
}

//! sqrt((N - m) / (m (N - 1))).
inline double welch_bound(std::size_t m, std::size_t N) {
    require(m >= 1 && N >= 2, "welch_bound requires m >= 1 and N >= 2");
    require(N >= m, "welch_bound requires N >= m (undercomplete dictionaries are not covered)");
    const double md = static_cast<double>(m), Nd = static_cast<double>(N);
    return std::sqrt((Nd - md) / (md * (Nd - 1.0)));
}

//! [I_m, F_m] with F_m the unitary DFT; A is the identity block.
inline PartitionedDictionary build_two_onb(std::size_t m) {
    require(m >= 2, "two-ONB dictionary needs m >= 2");
    const auto n = static_cast<Eigen::Index>(m);
    ComplexMatrix d(n, 2 * n);
    d.leftCols(n).setIdentity();
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index t = 0; t < n; ++t) {
            const auto r = static_cast<double>((t * k) % n);
            d(t, n + k) = std::polar(scale, -2.0 * kPi * r / static_cast<double>(m));
        }
    return PartitionedDictionary(std::move(d), m);
}

//! p + 1 mutually unbiased bases of C^p for an odd prime p: the identity
//! followed by the chirp bases v_{a,b}[t] = exp(2 pi i (a t^2 + b t) / p) / sqrt(p),
//! a = 0..p-1 (outer), b = 0..p-1 (inner). A is the identity basis.
inline PartitionedDictionary build_mub(std::size_t p) {
    if (!detail::is_odd_prime(p))
        throw Error("p must be an odd prime (got " + std::to_string(p) +
                    "); other dimensions can be imported from a .dict.json file");
    const auto n = static_cast<Eigen::Index>(p);
    ComplexMatrix d(n, n * (n + 1));
    d.leftCols(n).setIdentity();
    const double scale = 1.0 / std::sqrt(static_cast<double>(p));
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            const Eigen::Index col = n + a * n + b;
            for (Eigen::Index t = 0; t < n; ++t) {
                // Reduce the exponent mod p before scaling so the phase is exact.
                const auto r = static_cast<double>((a * t % n * t + b * t) % n);
                d(t, col) = std::polar(scale, 2.0 * kPi * r / static_cast<double>(p));
            }
        }
    return PartitionedDictionary(std::move(d), p);
}

//! N columns i.i.d. uniform on the unit sphere of C^m (normalized complex
//! Gaussians), reproducible from `seed`.
inline PartitionedDictionary build_random_dictionary(std::size_t m, std::size_t N,
                                                     std::uint64_t seed, std::size_t split = 0) {
    require(m >= 1 && N >= m, "random dictionary needs N >= m >= 1");
    Rng rng(stream_seed(seed, 0xd1c7));
    std::normal_distribution<double> normal;
    ComplexMatrix d(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(N));
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
        for (Eigen::Index i = 0; i < d.rows(); ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            d(i, j) = Complex(re, im);
        }
        d.col(j) /= d.col(j).norm();
    }
    return PartitionedDictionary(std::move(d), split);
}

//! The m + 1 column harmonic simplex frame: rows 1..m of the unitary
//! (m+1)-point DFT, rescaled to unit columns. Every pair of columns has inner
//! product -1/m, the Welch bound for N = m + 1.
inline PartitionedDictionary build_simplex_frame(std::size_t m, std::size_t split) {
    require(m >= 2, "simplex frame needs m >= 2");
    const auto n = static_cast<Eigen::Index>(m);
    ComplexMatrix d(n, n + 1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (Eigen::Index j = 0; j <= n; ++j)
        for (Eigen::Index k = 1; k <= n; ++k) {
            const auto r = static_cast<double>((j * k) % (n + 1));
            d(k - 1, j) = std::polar(scale, 2.0 * kPi * r / static_cast<double>(m + 1));
        }
    return PartitionedDictionary(std::move(d), split);
}

inline DictionaryStats analyze(const PartitionedDictionary& dict) {
    DictionaryStats st;
    st.m = dict.rows();
    st.N = dict.cols();
    st.Na = dict.sizeA();
    st.Nb = dict.sizeB();
    const ComplexMatrix& d = dict.matrix();
    const ComplexMatrix gram = d.adjoint() * d;
    const auto na = static_cast<Eigen::Index>(st.Na);
    const auto nb = static_cast<Eigen::Index>(st.Nb);
    st.mu = st.N >= 2 ? detail::max_offdiagonal_modulus(gram) : 0.0;
    st.muAUndefined = st.Na < 2;
    st.muBUndefined = st.Nb < 2;
    st.muA = st.muAUndefined ? 0.0 : detail::max_offdiagonal_modulus(gram.topLeftCorner(na, na));
    st.muB = st.muBUndefined ? 0.0
                             : detail::max_offdiagonal_modulus(gram.bottomRightCorner(nb, nb));
    st.specD = spectral_norm(d);
    st.specA = na > 0 ? spectral_norm(d.leftCols(na)) : 0.0;
    st.specB = nb > 0 ? spectral_norm(d.rightCols(nb)) : 0.0;
    st.welch = st.N >= 2 && st.N >= st.m ? welch_bound(st.m, st.N) : 0.0;
    const double m = static_cast<double>(st.m);
    st.tightDevA = std::abs(st.specA * st.specA - static_cast<double>(st.Na) / m);
    st.tightDevB = std::abs(st.specB * st.specB - static_cast<double>(st.Nb) / m);
    return st;
}

inline nlohmann::json to_json(const DictionaryStats& st) {
    return {{"m", st.m},           {"N", st.N},
            {"Na", st.Na},         {"Nb", st.Nb},
            {"mu", st.mu},         {"muA", st.muA},
            {"muB", st.muB},       {"muA_undefined", st.muAUndefined},
            {"muB_undefined", st.muBUndefined},
            {"specA", st.specA},   {"specB", st.specB},
            {"specD", st.specD},   {"welch", st.welch},
            {"tightDevA", st.tightDevA}, {"tightDevB", st.tightDevB}};
}

// ---------------------------------------------------------------------------
// .dict.json: {"m": .., "N": .., "Na": .., "entries": [[re, im], ...]} with
// entries row-major and every number written with 17 significant digits.

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline void write_dictionary(std::ostream& out, const PartitionedDictionary& dict) {
    const ComplexMatrix& d = dict.matrix();
    out << "{\n  \"m\": " << dict.rows() << ",\n  \"N\": " << dict.cols()
        << ",\n  \"Na\": " << dict.split() << ",\n  \"entries\": [";
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
            out << ((i == 0 && j == 0) ? "\n    " : ",\n    ");
            out << '[' << format_real(d(i, j).real()) << ", " << format_real(d(i, j).imag()) << ']';
        }
    out << "\n  ]\n}\n";
}

inline void save_dictionary(const PartitionedDictionary& dict, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), "cannot open " + path + " for writing");
    write_dictionary(out, dict);
    require(static_cast<bool>(out), "failed writing " + path);
}

struct LoadOptions {
    double unitTolerance = 1e-8;
    bool renormalize = false;
};

inline PartitionedDictionary parse_dictionary(const std::string& text, LoadOptions opts = {}) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed dictionary file: ") + e.what());
    }
    for (const char* key : {"m", "N", "Na"})
        if (!doc.contains(key) || !doc[key].is_number_unsigned())
            throw Error(std::string("malformed header: field '") + key +
                        "' missing or not a non-negative integer");
    if (!doc.contains("entries") || !doc["entries"].is_array())
        throw Error("malformed header: field 'entries' missing or not an array");
    const auto m = doc["m"].get<std::size_t>();
    const auto N = doc["N"].get<std::size_t>();
    const auto Na = doc["Na"].get<std::size_t>();
    require(m >= 1 && N >= 1, "malformed header: m and N must be positive");
    require(Na <= N, "invalid split: Na = " + std::to_string(Na) + " > N = " + std::to_string(N));
    const auto& entries = doc["entries"];
    require(entries.size() == m * N, "entry count mismatch: expected " + std::to_string(m * N) +
                                         ", found " + std::to_string(entries.size()));
    ComplexMatrix d(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(N));
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& e = entries[k];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw Error("entry " + std::to_string(k) + " is not a [re, im] pair");
        d(static_cast<Eigen::Index>(k / N), static_cast<Eigen::Index>(k % N)) =
            Complex(e[0].get<double>(), e[1].get<double>());
    }
    require(d.allFinite(), "dictionary has non-finite entries");
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
        const double n = d.col(j).norm();
        if (n == 0.0) throw Error("column " + std::to_string(j) + " is zero");
        if (opts.renormalize) {
            d.col(j) /= n;
        } else if (std::abs(n - 1.0) > opts.unitTolerance) {
            throw Error("column " + std::to_string(j) + " has norm " + format_real(n) +
                        ", expected 1 within " + format_real(opts.unitTolerance));
        }
    }
    return PartitionedDictionary(std::move(d), Na, opts.renormalize ? PartitionedDictionary::kUnitTolerance
                                                                    : opts.unitTolerance);
}

inline PartitionedDictionary load_dictionary(const std::string& path, LoadOptions opts = {}) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open dictionary file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_dictionary(ss.str(), opts);
}

}  // namespace rsparse
