#pragma once

// Exact computations over the integral transportation polytope U(r,c):
// enumeration, counting, the weighted volume T(r,c;K), the generating
// function V(r,c;M) and the Fisher-Yates statistic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tpk/dense.hpp"
#include "tpk/error.hpp"
#include "tpk/histogram.hpp"

namespace tpk {

using BigCount = boost::multiprecision::cpp_int;

inline BigCount factorial(count_t n) {
    BigCount f = 1;
    for (count_t k = 2; k <= n; ++k) f *= k;
    return f;
}

enum class WeightOrigin { cost, weight };

// Paired cost matrix M and weight matrix K = exp(-M), entrywise. Whichever
// side is supplied is kept verbatim; the other is derived from it.
class WeightSpec {
public:
    WeightSpec() = default;

    static WeightSpec from_cost(Matrix<double> m) {
        check_square(m);
        Matrix<double> k(m.rows(), m.cols());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) {
                const double v = m(i, j);
                if (std::isnan(v) || v == -std::numeric_limits<double>::infinity())
                    throw Error(Errc::invalid_argument, "cost entries must be finite or +inf");
                k(i, j) = std::exp(-v);
            }
        return WeightSpec(std::move(m), std::move(k), WeightOrigin::cost);
    }

    static WeightSpec from_weight(Matrix<double> k) {
        check_square(k);
        Matrix<double> m(k.rows(), k.cols());
        for (std::size_t i = 0; i < k.rows(); ++i)
            for (std::size_t j = 0; j < k.cols(); ++j) {
                const double v = k(i, j);
                if (!std::isfinite(v) || v < 0.0)
                    throw Error(Errc::invalid_argument, "weight entries must be finite and nonnegative");
                m(i, j) = -std::log(v);  // +inf for k_ij = 0
            }
        return WeightSpec(std::move(m), std::move(k), WeightOrigin::weight);
    }

    std::size_t dim() const noexcept { return cost_.rows(); }
    const Matrix<double>& cost() const noexcept { return cost_; }
    const Matrix<double>& weight() const noexcept { return weight_; }
    WeightOrigin origin() const noexcept { return origin_; }

    double min_weight() const {
        const auto data = weight_.data();
        return *std::min_element(data.begin(), data.end());
    }

    // Symmetry of the supplied side, relative to its largest finite magnitude.
    bool symmetric(double rel_tol = 1e-12) const {
        const Matrix<double>& a = origin_ == WeightOrigin::cost ? cost_ : weight_;
        double scale = 0.0;
        for (double v : a.data())
            if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = i + 1; j < a.cols(); ++j) {
                const double x = a(i, j), y = a(j, i);
                if (x == y) continue;
                if (!(std::abs(x - y) <= rel_tol * std::max(scale, 1e-300))) return false;
            }
        return true;
    }

    void require_symmetric() const {
        if (!symmetric()) throw Error(Errc::invalid_argument, "weight matrix K must be symmetric in PSD mode");
    }

    WeightSpec transposed() const { return WeightSpec(cost_.transposed(), weight_.transposed(), origin_); }

    void require_dim(std::size_t d) const {
        if (dim() != d)
            throw Error(Errc::dimension_mismatch, "weight matrix is " + std::to_string(dim()) + "x" +
                                                      std::to_string(dim()) + ", histograms have d = " +
                                                      std::to_string(d));
    }

private:
    WeightSpec(Matrix<double> m, Matrix<double> k, WeightOrigin origin)
        : cost_(std::move(m)), weight_(std::move(k)), origin_(origin) {}

    static void check_square(const Matrix<double>& a) {
        if (!a.square() || a.rows() == 0) throw Error(Errc::invalid_argument, "weight matrix must be square, d >= 1");
    }

    Matrix<double> cost_;
    Matrix<double> weight_;
    WeightOrigin origin_ = WeightOrigin::cost;
};

struct EnumerationBudget {
    static constexpr std::uint64_t default_max_tables = 10'000'000;
    std::uint64_t max_tables = default_max_tables;
};

namespace detail {

// Streaming soft-minimum: keeps the running minimum u* and s = sum exp(-(u - u*)).
class SoftminAccumulator {
public:
    void add(double u) {
        if (std::isnan(u)) throw Error(Errc::numeric_error, "NaN in soft-minimum");
        if (u == std::numeric_limits<double>::infinity()) {
            ++count_;
            return;
        }
        if (!any_finite_) {
            shift_ = u;
            sum_ = 1.0;
            any_finite_ = true;
        } else if (u < shift_) {
            sum_ = sum_ * std::exp(u - shift_) + 1.0;
            shift_ = u;
        } else {
            sum_ += std::exp(shift_ - u);
        }
        ++count_;
    }

    std::size_t count() const noexcept { return count_; }

    // -log sum exp(-u_i)
    double softmin() const {
        if (count_ == 0) throw Error(Errc::invalid_argument, "soft-minimum of an empty family");
        if (!any_finite_) return std::numeric_limits<double>::infinity();
        return shift_ - std::log(sum_);
    }

    // sum exp(-u_i)
    double sum_exp() const {
        if (!any_finite_) return 0.0;
        return std::exp(-shift_) * sum_;
    }

private:
    double shift_ = 0.0;
    double sum_ = 0.0;
    bool any_finite_ = false;
    std::size_t count_ = 0;
};

class TableWalker {
public:
    TableWalker(const Histogram& r, const Histogram& c, EnumerationBudget budget,
                const std::function<void(const ContingencyTable&)>& visit)
        : r_(r), c_(c), budget_(budget), visit_(visit), d_(r.dim()), x_(d_, d_, 0),
          colres_(c.counts()) {}

    void run() { fill_row(0); }
    std::uint64_t emitted() const noexcept { return emitted_; }

private:
    void fill_row(std::size_t i) {
        if (i + 1 == d_) {
            for (std::size_t j = 0; j < d_; ++j) x_(i, j) = colres_[j];
            emit();
            for (std::size_t j = 0; j < d_; ++j) x_(i, j) = 0;
            return;
        }
        count_t tail = 0;
        for (count_t v : colres_) tail += v;
        fill_cell(i, 0, r_[i], tail);
    }

    // rem: mass still to place in row i; tail: residual column mass from column j on.
    void fill_cell(std::size_t i, std::size_t j, count_t rem, count_t tail) {
        if (j + 1 == d_) {
            // rem <= colres_[j] holds because earlier cells respected the lower bound
            place(i, j, rem);
            fill_row(i + 1);
            place(i, j, -rem);
            return;
        }
        const count_t after = tail - colres_[j];
        const count_t lo = std::max<count_t>(0, rem - after);
        const count_t hi = std::min(rem, colres_[j]);
        for (count_t v = lo; v <= hi; ++v) {
            place(i, j, v);
            fill_cell(i, j + 1, rem - v, after);
            place(i, j, -v);
        }
    }

    void place(std::size_t i, std::size_t j, count_t v) {
        x_(i, j) += v;
        colres_[j] -= v;
    }

    void emit() {
        if (emitted_ >= budget_.max_tables)
            throw Error(Errc::budget_exceeded, "more than " + std::to_string(budget_.max_tables) +
                                                   " contingency tables (" + std::to_string(emitted_) +
                                                   " enumerated so far)");
        ++emitted_;
        visit_(ContingencyTable(x_, r_, c_));
    }

    const Histogram& r_;
    const Histogram& c_;
    EnumerationBudget budget_;
    const std::function<void(const ContingencyTable&)>& visit_;
    std::size_t d_;
    Matrix<count_t> x_;
    std::vector<count_t> colres_;
    std::uint64_t emitted_ = 0;
};

}  // namespace detail

// Visits every table of U(r,c) exactly once, row-major lexicographic order.
// Throws Errc::budget_exceeded before visiting table max_tables + 1.
// Returns the number of tables visited.
inline std::uint64_t for_each_table(const Histogram& r, const Histogram& c, EnumerationBudget budget,
                                    const std::function<void(const ContingencyTable&)>& visit) {
    require_same_mass(r, c);
    detail::TableWalker walker(r, c, budget, visit);
    walker.run();
    return walker.emitted();
}

inline std::vector<ContingencyTable> enumerate_tables(const Histogram& r, const Histogram& c,
                                                      EnumerationBudget budget = {}) {
    std::vector<ContingencyTable> out;
    for_each_table(r, c, budget, [&](const ContingencyTable& x) { out.push_back(x); });
    return out;
}

// |U(r,c)| by dynamic programming over rows. The number of completions only
// depends on the multiset of residual column sums, so memo keys are sorted.
inline BigCount count_tables(const Histogram& r, const Histogram& c) {
    require_same_mass(r, c);
    const std::size_t d = r.dim();
    std::vector<std::map<std::vector<count_t>, BigCount>> memo(d);

    std::function<BigCount(std::size_t, std::vector<count_t>)> ways = [&](std::size_t i,
                                                                          std::vector<count_t> colres) {
        if (i + 1 == d) return BigCount(1);
        std::sort(colres.begin(), colres.end());
        if (auto it = memo[i].find(colres); it != memo[i].end()) return it->second;

        BigCount total = 0;
        std::vector<count_t> next(colres);
        std::function<void(std::size_t, count_t, count_t)> row = [&](std::size_t j, count_t rem, count_t tail) {
            if (j + 1 == d) {
                next[j] = colres[j] - rem;
                total += ways(i + 1, next);
                return;
            }
            const count_t after = tail - colres[j];
            const count_t lo = std::max<count_t>(0, rem - after);
            const count_t hi = std::min(rem, colres[j]);
            for (count_t v = lo; v <= hi; ++v) {
                next[j] = colres[j] - v;
                row(j + 1, rem - v, after);
            }
            next[j] = colres[j];
        };
        count_t tail = 0;
        for (count_t v : colres) tail += v;
        row(0, r[i], tail);
        memo[i].emplace(colres, total);
        return total;
    };
    return ways(0, c.counts());
}

// log prod_ij k_ij^x_ij, with 0^0 = 1 and -inf when some x_ij > 0 meets k_ij = 0.
inline double log_table_weight(const ContingencyTable& x, const WeightSpec& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i)
        for (std::size_t j = 0; j < x.dim(); ++j)
            if (x(i, j) != 0) s += static_cast<double>(x(i, j)) * std::log(w.weight()(i, j));
    return s;
}

inline double table_weight(const ContingencyTable& x, const WeightSpec& w) {
    double p = 1.0;
    for (std::size_t i = 0; i < x.dim(); ++i)
        for (std::size_t j = 0; j < x.dim(); ++j)
            if (x(i, j) != 0) p *= std::pow(w.weight()(i, j), static_cast<double>(x(i, j)));
    return p;
}

// Plain products are safe only while k^x cannot underflow.
inline bool volume_needs_log_space(const Histogram& r, const WeightSpec& w) {
    return r.mass() > 64 || w.min_weight() < 1e-12;
}

// log T(r,c;K), accumulated per table in log space and combined by log-sum-exp.
inline double log_weighted_volume(const Histogram& r, const Histogram& c, const WeightSpec& w,
                                  EnumerationBudget budget = {}) {
    require_same_mass(r, c);
    w.require_dim(r.dim());
    detail::SoftminAccumulator acc;
    for_each_table(r, c, budget, [&](const ContingencyTable& x) { acc.add(-log_table_weight(x, w)); });
    return -acc.softmin();
}

// T(r,c;K) = sum over X in U(r,c) of prod_ij k_ij^x_ij.
inline double weighted_volume(const Histogram& r, const Histogram& c, const WeightSpec& w,
                              EnumerationBudget budget = {}) {
    require_same_mass(r, c);
    w.require_dim(r.dim());
    if (volume_needs_log_space(r, w)) return std::exp(log_weighted_volume(r, c, w, budget));
    double total = 0.0;
    for_each_table(r, c, budget, [&](const ContingencyTable& x) { total += table_weight(x, w); });
    return total;
}

// V(r,c;M) = sum over X in U(r,c) of exp(-<X,M>), computed from the cost side.
inline double generating_function(const Histogram& r, const Histogram& c, const WeightSpec& w,
                                  EnumerationBudget budget = {}) {
    require_same_mass(r, c);
    w.require_dim(r.dim());
    detail::SoftminAccumulator acc;
    for_each_table(r, c, budget, [&](const ContingencyTable& x) { acc.add(x.inner(w.cost())); });
    return acc.sum_exp();
}

// -log sum_i exp(-u_i), shifted by min u_i.
inline double softmin(std::span<const double> values) {
    if (values.empty()) throw Error(Errc::invalid_argument, "soft-minimum of an empty family");
    detail::SoftminAccumulator acc;
    for (double u : values) acc.add(u);
    return acc.softmin();
}

// Transport costs <X,M> of every table, in enumeration order.
inline std::vector<double> table_costs(const Histogram& r, const Histogram& c, const WeightSpec& w,
                                       EnumerationBudget budget = {}) {
    require_same_mass(r, c);
    w.require_dim(r.dim());
    std::vector<double> out;
    for_each_table(r, c, budget, [&](const ContingencyTable& x) { out.push_back(x.inner(w.cost())); });
    return out;
}

// n(X) = prod r_i! prod c_j! / prod x_ij!: the number of position
// permutations whose pattern is X.
inline BigCount fisher_yates(const ContingencyTable& x) {
    BigCount num = 1, den = 1;
    for (std::size_t i = 0; i < x.dim(); ++i) {
        num *= factorial(x.row_sums()[i]);
        num *= factorial(x.col_sums()[i]);
        for (std::size_t j = 0; j < x.dim(); ++j) den *= factorial(x(i, j));
    }
    BigCount q, rem;
    boost::multiprecision::divide_qr(num, den, q, rem);
    if (rem != 0) throw Error(Errc::numeric_error, "Fisher-Yates division is inexact; corrupted table");
    return q;
}

}  // namespace tpk
