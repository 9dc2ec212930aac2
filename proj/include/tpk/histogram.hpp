#pragma once

// Integral histograms, their sequence representation, permutations and
// contingency tables. All user-facing indices are 1-based; storage in
// Permutation is 0-based.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "tpk/dense.hpp"
#include "tpk/error.hpp"

namespace tpk {

using count_t = std::int64_t;

class Histogram {
public:
    Histogram() = default;

    explicit Histogram(std::vector<count_t> counts) : counts_(std::move(counts)) {
        if (counts_.empty()) throw Error(Errc::invalid_argument, "histogram must have dimension d >= 1");
        for (count_t v : counts_)
            if (v < 0) throw Error(Errc::invalid_argument, "histogram entries must be nonnegative");
        mass_ = std::accumulate(counts_.begin(), counts_.end(), count_t{0});
    }

    Histogram(std::initializer_list<count_t> counts) : Histogram(std::vector<count_t>(counts)) {}

    std::size_t dim() const noexcept { return counts_.size(); }
    count_t mass() const noexcept { return mass_; }
    count_t operator[](std::size_t i) const { return counts_[i]; }
    const std::vector<count_t>& counts() const noexcept { return counts_; }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(counts_[i]);
        }
        return s;
    }

    bool operator==(const Histogram&) const = default;
    auto operator<=>(const Histogram&) const = default;

private:
    std::vector<count_t> counts_;
    count_t mass_ = 0;
};

inline void require_same_dim(const Histogram& r, const Histogram& c) {
    if (r.dim() != c.dim())
        throw Error(Errc::dimension_mismatch, "histograms have dimensions " + std::to_string(r.dim()) +
                                                  " and " + std::to_string(c.dim()));
}

inline void require_same_mass(const Histogram& r, const Histogram& c) {
    require_same_dim(r, c);
    if (r.mass() != c.mass())
        throw Error(Errc::mass_mismatch, "histograms have total masses " + std::to_string(r.mass()) +
                                             " and " + std::to_string(c.mass()));
}

// A bijection on {0..n-1}; image()[i] is where i goes. Construct from the
// 1-based notation with from_one_based({3,1,2}).
class Permutation {
public:
    Permutation() = default;

    explicit Permutation(std::vector<std::size_t> image) : image_(std::move(image)) {
        std::vector<bool> seen(image_.size(), false);
        for (std::size_t v : image_) {
            if (v >= image_.size() || seen[v])
                throw Error(Errc::invalid_argument, "image array is not a permutation");
            seen[v] = true;
        }
    }

    static Permutation identity(std::size_t n) {
        std::vector<std::size_t> image(n);
        std::iota(image.begin(), image.end(), std::size_t{0});
        return Permutation(std::move(image));
    }

    static Permutation from_one_based(const std::vector<std::size_t>& one_based) {
        std::vector<std::size_t> image(one_based.size());
        for (std::size_t i = 0; i < one_based.size(); ++i) {
            if (one_based[i] == 0) throw Error(Errc::invalid_argument, "1-based permutation entry 0");
            image[i] = one_based[i] - 1;
        }
        return Permutation(std::move(image));
    }

    std::size_t size() const noexcept { return image_.size(); }
    std::size_t operator()(std::size_t i) const { return image_[i]; }
    const std::vector<std::size_t>& image() const noexcept { return image_; }

    std::vector<std::size_t> one_based() const {
        std::vector<std::size_t> out(image_);
        for (auto& v : out) ++v;
        return out;
    }

    bool is_identity() const {
        for (std::size_t i = 0; i < image_.size(); ++i)
            if (image_[i] != i) return false;
        return true;
    }

    Permutation inverse() const {
        std::vector<std::size_t> inv(image_.size());
        for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = i;
        return Permutation(std::move(inv));
    }

    // (this ∘ other)(i) = this(other(i))
    Permutation compose(const Permutation& other) const {
        if (other.size() != size()) throw Error(Errc::dimension_mismatch, "composing permutations of different size");
        std::vector<std::size_t> out(size());
        for (std::size_t i = 0; i < size(); ++i) out[i] = image_[other.image_[i]];
        return Permutation(std::move(out));
    }

    bool operator==(const Permutation&) const = default;
    auto operator<=>(const Permutation&) const = default;

private:
    std::vector<std::size_t> image_;
};

// Permutations of the d bins and of the N sequence positions share one type.
using PermutationD = Permutation;
using PermutationN = Permutation;

// Length-N word over the alphabet {1..d}, symbols stored 1-based.
class IndexSequence {
public:
    IndexSequence() = default;

    IndexSequence(std::size_t alphabet, std::vector<std::size_t> symbols)
        : alphabet_(alphabet), symbols_(std::move(symbols)) {
        if (alphabet_ == 0) throw Error(Errc::invalid_argument, "alphabet size must be >= 1");
        for (std::size_t s : symbols_)
            if (s < 1 || s > alphabet_)
                throw Error(Errc::invalid_argument,
                            "symbol " + std::to_string(s) + " outside {1.." + std::to_string(alphabet_) + "}");
    }

    std::size_t alphabet() const noexcept { return alphabet_; }
    std::size_t size() const noexcept { return symbols_.size(); }
    std::size_t operator[](std::size_t t) const { return symbols_[t]; }
    const std::vector<std::size_t>& symbols() const noexcept { return symbols_; }

    // Number of occurrences of each symbol, as a histogram.
    Histogram content() const {
        std::vector<count_t> counts(alphabet_, 0);
        for (std::size_t s : symbols_) ++counts[s - 1];
        return Histogram(std::move(counts));
    }

    // alpha_pi = [alpha_{pi(1)} ... alpha_{pi(N)}]
    IndexSequence permuted(const PermutationN& pi) const {
        if (pi.size() != symbols_.size())
            throw Error(Errc::dimension_mismatch, "position permutation has wrong length");
        std::vector<std::size_t> out(symbols_.size());
        for (std::size_t t = 0; t < out.size(); ++t) out[t] = symbols_[pi(t)];
        return IndexSequence(alphabet_, std::move(out));
    }

    bool operator==(const IndexSequence&) const = default;

private:
    std::size_t alphabet_ = 0;
    std::vector<std::size_t> symbols_;
};

// d x d nonnegative integer matrix with prescribed marginals.
class ContingencyTable {
public:
    ContingencyTable() = default;

    ContingencyTable(Matrix<count_t> entries, Histogram row_sums, Histogram col_sums)
        : entries_(std::move(entries)), row_sums_(std::move(row_sums)), col_sums_(std::move(col_sums)) {
        const std::size_t d = row_sums_.dim();
        if (col_sums_.dim() != d || entries_.rows() != d || entries_.cols() != d)
            throw Error(Errc::dimension_mismatch, "table shape does not match its marginals");
        if (row_sums_.mass() != col_sums_.mass())
            throw Error(Errc::mass_mismatch, "row and column marginals differ in mass");
        for (std::size_t i = 0; i < d; ++i) {
            count_t rs = 0, cs = 0;
            for (std::size_t j = 0; j < d; ++j) {
                if (entries_(i, j) < 0) throw Error(Errc::invalid_argument, "negative table entry");
                rs += entries_(i, j);
                cs += entries_(j, i);
            }
            if (rs != row_sums_[i] || cs != col_sums_[i])
                throw Error(Errc::invalid_argument, "table entries do not match marginals");
        }
    }

    // Marginals are read off the entries.
    static ContingencyTable from_entries(Matrix<count_t> entries) {
        if (!entries.square() || entries.rows() == 0)
            throw Error(Errc::invalid_argument, "contingency table must be square with d >= 1");
        const std::size_t d = entries.rows();
        std::vector<count_t> r(d, 0), c(d, 0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                r[i] += entries(i, j);
                c[j] += entries(i, j);
            }
        Histogram rh(std::move(r)), ch(std::move(c));
        return ContingencyTable(std::move(entries), std::move(rh), std::move(ch));
    }

    std::size_t dim() const noexcept { return row_sums_.dim(); }
    count_t operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
    const Matrix<count_t>& entries() const noexcept { return entries_; }
    const Histogram& row_sums() const noexcept { return row_sums_; }
    const Histogram& col_sums() const noexcept { return col_sums_; }

    std::size_t nonzeros() const {
        return static_cast<std::size_t>(std::count_if(entries_.data().begin(), entries_.data().end(),
                                                      [](count_t v) { return v != 0; }));
    }

    // Frobenius product <X, M>; zero entries contribute nothing even if m_ij is infinite.
    double inner(const Matrix<double>& m) const {
        double s = 0.0;
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = 0; j < dim(); ++j)
                if (entries_(i, j) != 0) s += static_cast<double>(entries_(i, j)) * m(i, j);
        return s;
    }

    // Row-major flattening, comma separated.
    std::string to_csv_row() const {
        std::string s;
        for (std::size_t k = 0; k < entries_.data().size(); ++k) {
            if (k) s += ',';
            s += std::to_string(entries_.data()[k]);
        }
        return s;
    }

    bool operator==(const ContingencyTable&) const = default;

private:
    Matrix<count_t> entries_;
    Histogram row_sums_;
    Histogram col_sums_;
};

// rho = [1 x r_1, 2 x r_2, ..., d x r_d]
inline IndexSequence canonical_sequence(const Histogram& r) {
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(r.mass()));
    for (std::size_t i = 0; i < r.dim(); ++i) out.insert(out.end(), static_cast<std::size_t>(r[i]), i + 1);
    return IndexSequence(r.dim(), std::move(out));
}

// rho_sigma: blocks of sigma(1) repeated r_{sigma(1)} times, then sigma(2), ...
inline IndexSequence permuted_sequence(const Histogram& r, const PermutationD& sigma) {
    if (sigma.size() != r.dim())
        throw Error(Errc::dimension_mismatch, "permutation acts on " + std::to_string(sigma.size()) +
                                                  " bins, histogram has " + std::to_string(r.dim()));
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(r.mass()));
    for (std::size_t a = 0; a < r.dim(); ++a) {
        const std::size_t bin = sigma(a);
        out.insert(out.end(), static_cast<std::size_t>(r[bin]), bin + 1);
    }
    return IndexSequence(r.dim(), std::move(out));
}

// Pattern of a generalized permutation: x_ij = #{t : rho_t = i, gamma_t = j}.
inline ContingencyTable chi(const IndexSequence& rho, const IndexSequence& gamma) {
    if (rho.size() != gamma.size())
        throw Error(Errc::invalid_argument, "generalized permutation rows have lengths " +
                                                std::to_string(rho.size()) + " and " + std::to_string(gamma.size()));
    if (rho.alphabet() != gamma.alphabet())
        throw Error(Errc::dimension_mismatch, "sequences over different alphabets");
    const std::size_t d = rho.alphabet();
    Matrix<count_t> x(d, d, 0);
    for (std::size_t t = 0; t < rho.size(); ++t) ++x(rho[t] - 1, gamma[t] - 1);
    return ContingencyTable(std::move(x), rho.content(), gamma.content());
}

}  // namespace tpk
