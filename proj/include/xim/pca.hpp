#ifndef XIM_PCA_HPP
#define XIM_PCA_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "core.hpp"

/**
 * @file pca.hpp
 *
 * @brief Principal component extraction by deterministic power iteration
 * with deflation. Shared by the PCA baseline embedder and the plane-based
 * prototype initialization.
 */

namespace xim {

/** Principal axes of a point cloud. */
struct PcaModel {
    Matrix components;                ///< q x D eigenvectors, row per component.
    std::vector<double> eigenvalues;  ///< descending covariance eigenvalues.
    std::vector<double> mean;         ///< column means used for centering.
};

/**
 * Fit the top @p q principal components of an N x D matrix.
 *
 * The covariance (divisor N-1) is diagonalized one component at a time with
 * power iteration (tolerance @p tol on the iterate change) followed by
 * deflation. The start vector is fixed, so results are deterministic. Each
 * eigenvector's sign is chosen so its largest-magnitude entry is positive.
 */
inline PcaModel pca_fit(const Matrix& points, size_t q, double tol = 1e-10, size_t max_iter = 100000) {
    const size_t n = points.rows();
    const size_t d = points.cols();
    if (n < 1 || d < 1) {
        throw ConfigError("pca requires a nonempty matrix");
    }
    if (q < 1 || q > d || q > (n > 1 ? n - 1 : 1)) {
        throw ConfigError("pca component count out of range");
    }

    PcaModel model;
    model.mean.assign(d, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const double* row = points.row(i);
        for (size_t c = 0; c < d; ++c) {
            model.mean[c] += row[c];
        }
    }
    for (size_t c = 0; c < d; ++c) {
        model.mean[c] /= static_cast<double>(n);
    }

    // Covariance, divisor N-1 (zero matrix for a single point).
    Matrix cov(d, d);
    if (n > 1) {
        for (size_t i = 0; i < n; ++i) {
            const double* row = points.row(i);
            for (size_t a = 0; a < d; ++a) {
                const double xa = row[a] - model.mean[a];
                for (size_t b = a; b < d; ++b) {
                    cov(a, b) += xa * (row[b] - model.mean[b]);
                }
            }
        }
        const double scale = 1.0 / static_cast<double>(n - 1);
        for (size_t a = 0; a < d; ++a) {
            for (size_t b = a; b < d; ++b) {
                cov(a, b) *= scale;
                cov(b, a) = cov(a, b);
            }
        }
    }

    model.components = Matrix(q, d);
    model.eigenvalues.assign(q, 0.0);

    std::vector<double> v(d), z(d);
    for (size_t comp = 0; comp < q; ++comp) {
        // Fixed, mildly asymmetric start vector.
        for (size_t c = 0; c < d; ++c) {
            v[c] = 1.0 + 1e-3 * static_cast<double>((c + comp) % 7);
        }
        double vnorm = 0;
        for (size_t c = 0; c < d; ++c) {
            vnorm += v[c] * v[c];
        }
        vnorm = std::sqrt(vnorm);
        for (size_t c = 0; c < d; ++c) {
            v[c] /= vnorm;
        }

        double lambda = 0;
        for (size_t it = 0; it < max_iter; ++it) {
            for (size_t a = 0; a < d; ++a) {
                double acc = 0;
                for (size_t b = 0; b < d; ++b) {
                    acc += cov(a, b) * v[b];
                }
                z[a] = acc;
            }
            double znorm = 0;
            for (size_t a = 0; a < d; ++a) {
                znorm += z[a] * z[a];
            }
            znorm = std::sqrt(znorm);
            if (znorm < 1e-300) {
                lambda = 0;  // degenerate direction left
                break;
            }
            double delta = 0;
            for (size_t a = 0; a < d; ++a) {
                const double next = z[a] / znorm;
                delta = std::max(delta, std::fabs(next - v[a]));
                v[a] = next;
            }
            lambda = znorm;
            if (delta < tol) {
                break;
            }
        }

        // Sign convention: largest-magnitude entry positive.
        size_t peak = 0;
        for (size_t c = 1; c < d; ++c) {
            if (std::fabs(v[c]) > std::fabs(v[peak])) {
                peak = c;
            }
        }
        if (v[peak] < 0) {
            for (size_t c = 0; c < d; ++c) {
                v[c] = -v[c];
            }
        }

        model.eigenvalues[comp] = lambda;
        for (size_t c = 0; c < d; ++c) {
            model.components(comp, c) = v[c];
        }

        // Deflate.
        for (size_t a = 0; a < d; ++a) {
            for (size_t b = 0; b < d; ++b) {
                cov(a, b) -= lambda * v[a] * v[b];
            }
        }
    }
    return model;
}

/** Project points onto the fitted components (centering included). */
inline Matrix pca_project(const PcaModel& model, const Matrix& points) {
    const size_t n = points.rows();
    const size_t d = points.cols();
    if (d != model.mean.size()) {
        throw ShapeError("point dimensionality does not match the fitted pca model");
    }
    const size_t q = model.components.rows();
    Matrix coords(n, q);
    for (size_t i = 0; i < n; ++i) {
        const double* row = points.row(i);
        for (size_t comp = 0; comp < q; ++comp) {
            const double* axis = model.components.row(comp);
            double acc = 0;
            for (size_t c = 0; c < d; ++c) {
                acc += (row[c] - model.mean[c]) * axis[c];
            }
            coords(i, comp) = acc;
        }
    }
    return coords;
}

/** Total variance of the data (trace of the covariance, divisor N-1). */
inline double total_variance(const Matrix& points) {
    const size_t n = points.rows();
    const size_t d = points.cols();
    if (n < 2) {
        return 0;
    }
    std::vector<double> mean(d, 0.0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t c = 0; c < d; ++c) {
            mean[c] += points(i, c);
        }
    }
    for (size_t c = 0; c < d; ++c) {
        mean[c] /= static_cast<double>(n);
    }
    double acc = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t c = 0; c < d; ++c) {
            const double dv = points(i, c) - mean[c];
            acc += dv * dv;
        }
    }
    return acc / static_cast<double>(n - 1);
}

} // namespace xim

#endif
