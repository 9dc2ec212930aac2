#pragma once

// Exact optimal transport between integral histograms and the exp(-d_M)
// pseudo-kernel. Monge costs take the corner-rule fast path; everything
// else is minimized over the enumerated tables.

#include <cmath>
#include <cstddef>
#include <optional>

#include "tpk/histogram.hpp"
#include "tpk/northwest.hpp"
#include "tpk/polytope.hpp"

namespace tpk {

struct TransportSolution {
    ContingencyTable plan;
    double cost = 0.0;
};

// m_ij + m_kl <= m_il + m_kj for all i<k, j<l. Adjacent quadruples suffice:
// the general inequality is a telescoping sum of adjacent ones.
inline bool monge_check(const WeightSpec& w) {
    const Matrix<double>& m = w.cost();
    for (std::size_t i = 0; i + 1 < m.rows(); ++i)
        for (std::size_t j = 0; j + 1 < m.cols(); ++j)
            if (!(m(i, j) + m(i + 1, j + 1) <= m(i, j + 1) + m(i + 1, j))) return false;
    return true;
}

inline TransportSolution ot_cost(const Histogram& r, const Histogram& c, const WeightSpec& w,
                                 EnumerationBudget budget = {}) {
    require_same_mass(r, c);
    w.require_dim(r.dim());
    if (monge_check(w)) {
        ContingencyTable plan = nw_table(r, c);
        const double cost = plan.inner(w.cost());
        return {std::move(plan), cost};
    }
    std::optional<TransportSolution> best;
    for_each_table(r, c, budget, [&](const ContingencyTable& x) {
        const double cost = x.inner(w.cost());
        if (!best || cost < best->cost) best = TransportSolution{x, cost};
    });
    return std::move(*best);
}

// exp(-d_M(r,c)). Not positive definite in general.
inline double pseudo_kernel(const Histogram& r, const Histogram& c, const WeightSpec& w,
                            EnumerationBudget budget = {}) {
    return std::exp(-ot_cost(r, c, w, budget).cost);
}

}  // namespace tpk
