#pragma once

// Northwestern corner tables, their row/column-permuted variants, seeded
// permutation subsets and the Northwestern kernel
//
//   N(r,c;K,R) = sum over (s,s') in R x R of exp(-<M, NW_{s^-1 s'^-1}(r_s, c_s')>).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tpk/dense.hpp"
#include "tpk/error.hpp"
#include "tpk/histogram.hpp"
#include "tpk/polytope.hpp"

namespace tpk {

namespace detail {

// Runs the corner rule on (rows, cols) and calls step(i, j, v) for every
// assignment, v possibly 0. On a simultaneous row/column fill the walk
// advances diagonally.
template <typename Step>
void northwest_walk(const std::vector<count_t>& rows, const std::vector<count_t>& cols, Step&& step) {
    const std::size_t d = rows.size();
    count_t row_left = d ? rows[0] : 0;
    count_t col_left = d ? cols[0] : 0;
    std::size_t i = 0, j = 0;
    while (i < d && j < d) {
        const count_t v = std::min(row_left, col_left);
        step(i, j, v);
        row_left -= v;
        col_left -= v;
        const bool row_full = row_left == 0;
        const bool col_full = col_left == 0;
        if (row_full && ++i < d) row_left = rows[i];
        if (col_full && ++j < d) col_left = cols[j];
    }
}

inline std::vector<count_t> permute_counts(const Histogram& r, const PermutationD& sigma) {
    std::vector<count_t> out(r.dim());
    for (std::size_t a = 0; a < r.dim(); ++a) out[a] = r[sigma(a)];
    return out;
}

inline void require_perm_dim(const PermutationD& sigma, std::size_t d) {
    if (sigma.size() != d)
        throw Error(Errc::dimension_mismatch, "permutation acts on " + std::to_string(sigma.size()) +
                                                  " bins, histograms have d = " + std::to_string(d));
}

}  // namespace detail

inline ContingencyTable nw_table(const Histogram& r, const Histogram& c) {
    require_same_mass(r, c);
    const std::size_t d = r.dim();
    Matrix<count_t> x(d, d, 0);
    detail::northwest_walk(r.counts(), c.counts(), [&](std::size_t i, std::size_t j, count_t v) { x(i, j) += v; });
    return ContingencyTable(std::move(x), r, c);
}

// NW_{sigma^-1 sigma'^-1}(r_sigma, c_sigma'): corner rule on the permuted
// marginals, entry (a,b) of which lands at (sigma(a), sigma'(b)).
inline ContingencyTable nw_permuted(const Histogram& r, const Histogram& c, const PermutationD& sigma,
                                    const PermutationD& sigma_p) {
    require_same_mass(r, c);
    const std::size_t d = r.dim();
    detail::require_perm_dim(sigma, d);
    detail::require_perm_dim(sigma_p, d);
    Matrix<count_t> x(d, d, 0);
    detail::northwest_walk(detail::permute_counts(r, sigma), detail::permute_counts(c, sigma_p),
                           [&](std::size_t a, std::size_t b, count_t v) { x(sigma(a), sigma_p(b)) += v; });
    return ContingencyTable(std::move(x), r, c);
}

// <M, NW_{sigma^-1 sigma'^-1}(r_sigma, c_sigma')> in O(d), without a table.
inline double nw_permuted_cost(const std::vector<count_t>& r_sigma, const std::vector<count_t>& c_sigma_p,
                               const PermutationD& sigma, const PermutationD& sigma_p, const Matrix<double>& cost) {
    double s = 0.0;
    detail::northwest_walk(r_sigma, c_sigma_p, [&](std::size_t a, std::size_t b, count_t v) {
        if (v != 0) s += static_cast<double>(v) * cost(sigma(a), sigma_p(b));
    });
    return s;
}

// Ordered, duplicate-free subset R of S_d; always starts with the identity.
class PermutationSet {
public:
    PermutationSet(std::vector<PermutationD> perms, std::uint64_t seed, std::size_t size_target)
        : perms_(std::move(perms)), seed_(seed), size_target_(size_target) {
        if (perms_.empty() || !perms_.front().is_identity())
            throw Error(Errc::invalid_argument, "permutation set must start with the identity");
        std::set<PermutationD> seen(perms_.begin(), perms_.end());
        if (seen.size() != perms_.size()) throw Error(Errc::invalid_argument, "duplicate permutations in set");
        for (const auto& p : perms_)
            if (p.size() != perms_.front().size())
                throw Error(Errc::dimension_mismatch, "permutations of different sizes in set");
    }

    std::size_t size() const noexcept { return perms_.size(); }
    std::size_t dim() const noexcept { return perms_.front().size(); }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t size_target() const noexcept { return size_target_; }
    const std::vector<PermutationD>& perms() const noexcept { return perms_; }
    const PermutationD& operator[](std::size_t k) const { return perms_[k]; }

    auto begin() const { return perms_.begin(); }
    auto end() const { return perms_.end(); }

private:
    std::vector<PermutationD> perms_;
    std::uint64_t seed_;
    std::size_t size_target_;
};

namespace detail {

// Uniform integer in [0, bound) by rejection; independent of the standard
// library's distribution implementations so runs replay across toolchains.
inline std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = gen();
    } while (x >= limit);
    return x % bound;
}

inline void shuffle(std::vector<std::size_t>& v, std::mt19937_64& gen) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[bounded(gen, i)]);
}

}  // namespace detail

// Identity first, then distinct uniformly shuffled permutations.
inline PermutationSet sample_permutations(std::size_t d, std::size_t size_target, std::uint64_t seed) {
    if (d == 0) throw Error(Errc::invalid_argument, "dimension must be >= 1");
    if (size_target == 0) throw Error(Errc::invalid_argument, "size_target must be >= 1");
    if (d <= 20) {
        std::uint64_t fact = 1;
        for (std::uint64_t k = 2; k <= d; ++k) fact *= k;
        if (size_target > fact)
            throw Error(Errc::invalid_argument, "size_target " + std::to_string(size_target) + " exceeds " +
                                                    std::to_string(d) + "! = " + std::to_string(fact));
    }
    std::mt19937_64 gen(seed);
    std::vector<PermutationD> perms{PermutationD::identity(d)};
    std::set<PermutationD> seen(perms.begin(), perms.end());
    std::vector<std::size_t> image(d);
    while (perms.size() < size_target) {
        std::iota(image.begin(), image.end(), std::size_t{0});
        detail::shuffle(image, gen);
        PermutationD p(image);
        if (seen.insert(p).second) perms.push_back(std::move(p));
    }
    return PermutationSet(std::move(perms), seed, size_target);
}

struct NwKernelOptions {
    bool normalize = false;  // divide by |R|^2
};

struct NwKernelEvaluation {
    double value = 0.0;
    std::size_t summands = 0;
};

inline NwKernelEvaluation evaluate_nw_kernel(const Histogram& r, const Histogram& c, const WeightSpec& w,
                                             const PermutationSet& R, NwKernelOptions opts = {}) {
    require_same_mass(r, c);
    w.require_dim(r.dim());
    detail::require_perm_dim(R[0], r.dim());

    std::vector<std::vector<count_t>> r_perm, c_perm;
    r_perm.reserve(R.size());
    c_perm.reserve(R.size());
    for (const auto& s : R) {
        r_perm.push_back(detail::permute_counts(r, s));
        c_perm.push_back(detail::permute_counts(c, s));
    }

    NwKernelEvaluation out;
    for (std::size_t a = 0; a < R.size(); ++a)
        for (std::size_t b = 0; b < R.size(); ++b) {
            out.value += std::exp(-nw_permuted_cost(r_perm[a], c_perm[b], R[a], R[b], w.cost()));
            ++out.summands;
        }
    if (opts.normalize) out.value /= static_cast<double>(R.size() * R.size());
    return out;
}

inline double nw_kernel(const Histogram& r, const Histogram& c, const WeightSpec& w, const PermutationSet& R,
                        NwKernelOptions opts = {}) {
    return evaluate_nw_kernel(r, c, w, R, opts).value;
}

}  // namespace tpk
