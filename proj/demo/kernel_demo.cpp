// Compares the exact weighted-volume kernel, the Northwestern kernel and the
// exp(-OT) pseudo-kernel on a handful of histograms in the same simplex.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <vector>

#include "tpk/tpk.hpp"

int main() {
    const std::vector<tpk::Histogram> data{{3, 1, 0, 2}, {1, 1, 2, 2}, {0, 3, 3, 0}, {2, 2, 1, 1}, {6, 0, 0, 0}};
    const std::size_t d = 4;

    // Gaussian kernel on bin positions: PSD, entrywise positive.
    tpk::Matrix<double> m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = 0.5 * std::pow(double(i) - double(j), 2);
    const auto w = tpk::WeightSpec::from_cost(m);

    tpk::KernelSpec volume{tpk::KernelKind::volume, w};
    tpk::KernelSpec nw{tpk::KernelKind::nw, w};
    nw.perms = tpk::sample_permutations(d, 8, 7);
    tpk::KernelSpec pseudo{tpk::KernelKind::pseudo, w};

    for (const auto* spec : {&volume, &nw, &pseudo}) {
        const auto g = tpk::build_gram(data, *spec);
        const auto cert = tpk::certify_psd(g);
        std::printf("%-7s min eig %+.3e  max eig %.3e  %s\n", g.kernel_id().c_str(), cert.min_eigenvalue,
                    cert.max_eigenvalue, cert.pass ? "psd" : "not psd");
    }

    std::printf("\nNW table for r=[2,5,3], c=[5,1,4]:\n");
    tpk::io::write_table(std::cout, tpk::nw_table({2, 5, 3}, {5, 1, 4}));
}
