#ifndef XIM_SYNTH_HPP
#define XIM_SYNTH_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "core.hpp"

/**
 * @file synth.hpp
 *
 * @brief Seeded surrogate data: labeled unit-variance Gaussian clusters with
 * an exact pairwise center separation.
 */

namespace xim {

/**
 * Generate labeled Gaussian clusters in @p dims dimensions. Cluster centers
 * sit at scaled orthonormal directions (Gram-Schmidt over seeded normal
 * draws), so every pair of centers is exactly @p separation apart. Points
 * are unit-variance isotropic around their center; labels are the cluster
 * indices in order.
 */
inline Dataset synth_clusters(const std::vector<size_t>& cluster_sizes, size_t dims, double separation, uint64_t seed) {
    const size_t k = cluster_sizes.size();
    if (k < 1) {
        throw ConfigError("at least one cluster size is required");
    }
    if (k > dims) {
        throw ConfigError("cannot place " + std::to_string(k) + " orthogonal cluster centers in " + std::to_string(dims) + " dimensions");
    }
    if (!(separation >= 0)) {
        throw ConfigError("separation must be nonnegative");
    }
    size_t n = 0;
    for (size_t size : cluster_sizes) {
        if (size < 1) {
            throw ConfigError("cluster sizes must be positive");
        }
        n += size;
    }

    SplitMix64 root(seed);
    SplitMix64 dir_rng = root.split();
    SplitMix64 noise_rng = root.split();

    // Orthonormal center directions via Gram-Schmidt on random normals.
    Matrix dirs(k, dims);
    for (size_t c = 0; c < k; ++c) {
        double* v = dirs.row(c);
        for (size_t d = 0; d < dims; ++d) {
            v[d] = dir_rng.next_normal();
        }
        for (size_t prev = 0; prev < c; ++prev) {
            const double* u = dirs.row(prev);
            double dot = 0;
            for (size_t d = 0; d < dims; ++d) {
                dot += v[d] * u[d];
            }
            for (size_t d = 0; d < dims; ++d) {
                v[d] -= dot * u[d];
            }
        }
        double norm = 0;
        for (size_t d = 0; d < dims; ++d) {
            norm += v[d] * v[d];
        }
        norm = std::sqrt(norm);
        if (norm < 1e-12) {
            throw DomainError("degenerate direction draw while placing cluster centers");
        }
        for (size_t d = 0; d < dims; ++d) {
            v[d] /= norm;
        }
    }

    // |a - b| = separation for orthonormal a, b scaled by separation/sqrt(2).
    const double scale = separation / std::sqrt(2.0);

    Dataset data;
    data.points = Matrix(n, dims);
    data.labels.reserve(n);
    size_t row = 0;
    for (size_t c = 0; c < k; ++c) {
        const double* center_dir = dirs.row(c);
        for (size_t i = 0; i < cluster_sizes[c]; ++i, ++row) {
            double* p = data.points.row(row);
            for (size_t d = 0; d < dims; ++d) {
                p[d] = scale * center_dir[d] + noise_rng.next_normal();
            }
            data.labels.push_back(static_cast<int>(c));
        }
    }
    return data;
}

} // namespace xim

#endif
