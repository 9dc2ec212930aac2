#pragma once

// Gram matrices over histogram datasets and positive-semidefiniteness
// certificates from a full symmetric eigendecomposition (cyclic Jacobi).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tpk/dense.hpp"
#include "tpk/error.hpp"
#include "tpk/histogram.hpp"
#include "tpk/northwest.hpp"
#include "tpk/ot.hpp"
#include "tpk/polytope.hpp"

namespace tpk {

struct SymmetricEigen {
    std::vector<double> values;  // ascending
    Matrix<double> vectors;      // column k pairs with values[k]
    int sweeps = 0;
};

inline double frobenius_norm(const Matrix<double>& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

// Cyclic Jacobi: sweeps of plane rotations until the off-diagonal Frobenius
// norm drops below rel_tol * ||a||_F.
inline SymmetricEigen jacobi_eigen(Matrix<double> a, double rel_tol = 1e-12, int max_sweeps = 100) {
    if (!a.square()) throw Error(Errc::invalid_argument, "eigendecomposition needs a square matrix");
    for (double v : a.data())
        if (!std::isfinite(v)) throw Error(Errc::numeric_error, "non-finite matrix entry");

    const std::size_t n = a.rows();
    Matrix<double> v = Matrix<double>::identity(n);
    const double target = rel_tol * frobenius_norm(a);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    int sweep = 0;
    while (off_norm() > target) {
        if (sweep == max_sweeps) throw Error(Errc::numeric_error, "Jacobi iteration did not converge");
        ++sweep;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = Matrix<double>(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    out.sweeps = sweep;
    return out;
}

enum class KernelKind { volume, nw, pseudo, oracle };

inline const char* kernel_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::volume: return "volume";
        case KernelKind::nw: return "nw";
        case KernelKind::pseudo: return "pseudo";
        case KernelKind::oracle: return "oracle";
    }
    return "unknown";
}

inline KernelKind parse_kernel_kind(const std::string& s) {
    if (s == "volume") return KernelKind::volume;
    if (s == "nw") return KernelKind::nw;
    if (s == "pseudo") return KernelKind::pseudo;
    if (s == "oracle") return KernelKind::oracle;
    throw Error(Errc::invalid_argument, "unknown kernel '" + s + "'");
}

// 64-bit FNV-1a over the comma/newline text form of the dataset.
inline std::string dataset_hash(std::span<const Histogram> histograms) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](char ch) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    };
    for (const auto& x : histograms) {
        for (char ch : x.to_string()) feed(ch);
        feed('\n');
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

class GramMatrix {
public:
    // Rejects asymmetry beyond rel_tol (relative to the largest entry), then
    // symmetrizes by averaging.
    GramMatrix(Matrix<double> values, std::string kernel_id, std::string dataset_hash, double rel_tol = 1e-12)
        : values_(std::move(values)), kernel_id_(std::move(kernel_id)), dataset_hash_(std::move(dataset_hash)) {
        if (!values_.square()) throw Error(Errc::invalid_argument, "Gram matrix must be square");
        double scale = 0.0;
        for (double v : values_.data()) {
            if (!std::isfinite(v)) throw Error(Errc::numeric_error, "non-finite Gram entry");
            scale = std::max(scale, std::abs(v));
        }
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = i + 1; j < size(); ++j) {
                const double x = values_(i, j), y = values_(j, i);
                if (std::abs(x - y) > rel_tol * scale)
                    throw Error(Errc::numeric_error, "Gram matrix is not symmetric at (" + std::to_string(i) + ", " +
                                                         std::to_string(j) + ")");
                values_(i, j) = values_(j, i) = 0.5 * (x + y);
            }
    }

    std::size_t size() const noexcept { return values_.rows(); }
    const Matrix<double>& values() const noexcept { return values_; }
    double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
    const std::string& kernel_id() const noexcept { return kernel_id_; }
    const std::string& dataset_hash() const noexcept { return dataset_hash_; }

private:
    Matrix<double> values_;
    std::string kernel_id_;
    std::string dataset_hash_;
};

struct PsdCertificate {
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::vector<double> eigenvalues;
};

inline PsdCertificate certify_eigenvalues(std::vector<double> eigenvalues, double tolerance) {
    PsdCertificate cert;
    cert.tolerance = tolerance;
    if (!eigenvalues.empty()) {
        cert.min_eigenvalue = eigenvalues.front();
        cert.max_eigenvalue = eigenvalues.back();
    }
    cert.pass = cert.min_eigenvalue >= -tolerance * std::max(1.0, cert.max_eigenvalue);
    cert.eigenvalues = std::move(eigenvalues);
    return cert;
}

inline PsdCertificate certify_psd(const GramMatrix& g, double tolerance = 1e-8) {
    return certify_eigenvalues(jacobi_eigen(g.values()).values, tolerance);
}

// Certifies the weight matrix K itself.
inline PsdCertificate psd_weight_check(const WeightSpec& w, double tolerance = 1e-8) {
    w.require_symmetric();
    Matrix<double> k = w.weight();
    for (std::size_t i = 0; i < k.rows(); ++i)
        for (std::size_t j = i + 1; j < k.cols(); ++j) k(i, j) = k(j, i) = 0.5 * (k(i, j) + k(j, i));
    return certify_eigenvalues(jacobi_eigen(std::move(k)).values, tolerance);
}

// Kernel selector with its parameters.
struct KernelSpec {
    KernelKind kind = KernelKind::volume;
    WeightSpec weights;
    EnumerationBudget budget{};
    std::optional<PermutationSet> perms;  // required for nw
    NwKernelOptions nw{};
};

// Histograms in a Gram dataset must share d and N.
inline void require_common_simplex(std::span<const Histogram> histograms) {
    if (histograms.empty()) throw Error(Errc::invalid_argument, "empty histogram dataset");
    const auto& h0 = histograms.front();
    for (std::size_t p = 1; p < histograms.size(); ++p) {
        const auto& h = histograms[p];
        if (h.dim() != h0.dim())
            throw Error(Errc::dimension_mismatch, "histogram " + std::to_string(p + 1) + " has dimension " +
                                                      std::to_string(h.dim()) + ", expected d = " +
                                                      std::to_string(h0.dim()));
        if (h.mass() != h0.mass())
            throw Error(Errc::mass_mismatch,
                        "histogram " + std::to_string(p + 1) + " has total mass " + std::to_string(h.mass()) +
                            ", expected N = " + std::to_string(h0.mass()) +
                            " (all histograms must share the same dimension d and total mass N)");
    }
}

// Evaluates kernel(h_p, h_q) on the upper triangle and mirrors it.
template <typename Kernel>
GramMatrix build_gram(std::span<const Histogram> histograms, Kernel&& kernel, std::string kernel_id) {
    require_common_simplex(histograms);
    const std::size_t m = histograms.size();
    Matrix<double> g(m, m);
    for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = p; q < m; ++q) {
            try {
                g(p, q) = g(q, p) = kernel(histograms[p], histograms[q]);
            } catch (const Error& e) {
                throw Error(e.code(), "kernel on histograms " + std::to_string(p + 1) + " and " +
                                          std::to_string(q + 1) + ": " + e.what());
            }
        }
    return GramMatrix(std::move(g), std::move(kernel_id), dataset_hash(histograms));
}

inline double evaluate_kernel(const KernelSpec& spec, const Histogram& r, const Histogram& c) {
    switch (spec.kind) {
        case KernelKind::volume: return weighted_volume(r, c, spec.weights, spec.budget);
        case KernelKind::nw:
            if (!spec.perms) throw Error(Errc::invalid_argument, "nw kernel needs a permutation set");
            return nw_kernel(r, c, spec.weights, *spec.perms, spec.nw);
        case KernelKind::pseudo: return pseudo_kernel(r, c, spec.weights, spec.budget);
        case KernelKind::oracle: break;
    }
    throw Error(Errc::invalid_argument, "oracle kernels are built through tpk::testing::oracles");
}

inline GramMatrix build_gram(std::span<const Histogram> histograms, const KernelSpec& spec) {
    if (!histograms.empty()) spec.weights.require_dim(histograms.front().dim());
    return build_gram(
        histograms, [&](const Histogram& r, const Histogram& c) { return evaluate_kernel(spec, r, c); },
        kernel_name(spec.kind));
}

}  // namespace tpk
