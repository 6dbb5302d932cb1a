#ifndef XIM_MAPPING_HPP
#define XIM_MAPPING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "core.hpp"

/**
 * @file mapping.hpp
 *
 * @brief Explicit mapping from the exploration space to the ordering space
 * through trained (prototype, node) reference pairs, via inverse-distance
 * (Shepard) interpolation. Works for training data and out-of-sample points
 * alike.
 */

namespace xim {

/** @brief Reference pairs (w_j, r_j) defining the mapping. */
struct ReferencePairs {
    Matrix sources;  ///< M x D prototypes in the exploration space.
    Matrix targets;  ///< M x d node coordinates in the ordering space.

    size_t m() const { return sources.rows(); }

    void validate() const {
        if (sources.rows() == 0) {
            throw ConfigError("mapping needs at least one reference pair");
        }
        if (sources.rows() != targets.rows()) {
            throw ShapeError("reference sources and targets disagree on row count");
        }
        if (!sources.all_finite() || !targets.all_finite()) {
            throw DomainError("reference pairs contain a non-finite value");
        }
    }
};

inline ReferencePairs reference_pairs(const PrototypeSet& protos, const Lattice& lattice) {
    if (protos.m() != lattice.m()) {
        throw ShapeError("prototype set and lattice disagree on node count");
    }
    return ReferencePairs{protos.w, lattice.nodes};
}

/** @brief Low-dimensional target coordinates with provenance. */
struct EmbeddingResult {
    Matrix coords;        ///< N x d target points.
    std::string method;   ///< method tag
    std::string config;   ///< config echo
    uint64_t seed = 0;
};

// Squared-distance threshold below which a query point counts as an exact
// hit on a reference source.
inline constexpr double kExactHitThreshold = 1e-12;

/**
 * Shepard interpolation of one point: y = sum_j u_j r_j / sum_j u_j with
 * u_j the inverse Euclidean distance to source j raised to @p power. A query
 * within the exact-hit threshold of a source returns that source's target
 * directly (lowest index on ties). With top_q > 0 only the top_q nearest
 * references contribute.
 *
 * The output is a convex combination of the targets, so it always lies in
 * their convex hull.
 */
inline std::vector<double> shepard_embed(const double* x, size_t dim, const ReferencePairs& pairs,
                                         double power = 2.0, const DistanceSpec& dist = {}, size_t top_q = 0) {
    pairs.validate();
    if (!(power > 0)) {
        throw ConfigError("interpolation power must be positive");
    }
    const size_t m = pairs.m();
    const size_t out_dim = pairs.targets.cols();

    std::vector<double> d2(m);
    for (size_t j = 0; j < m; ++j) {
        d2[j] = dist.between(x, pairs.sources.row(j), dim);
        if (d2[j] < kExactHitThreshold) {
            return std::vector<double>(pairs.targets.row(j), pairs.targets.row(j) + out_dim);
        }
    }

    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), size_t(0));
    if (top_q > 0 && top_q < m) {
        std::partial_sort(order.begin(), order.begin() + top_q, order.end(), [&](size_t a, size_t b) {
            return d2[a] < d2[b] || (d2[a] == d2[b] && a < b);
        });
        order.resize(top_q);
    }

    // d2 is a squared distance, so the inverse-distance weight to `power`
    // is d2^(-power/2).
    std::vector<double> y(out_dim, 0.0);
    double total = 0;
    for (size_t j : order) {
        const double u = std::pow(d2[j], -power / 2.0);
        total += u;
        const double* target = pairs.targets.row(j);
        for (size_t c = 0; c < out_dim; ++c) {
            y[c] += u * target[c];
        }
    }
    for (size_t c = 0; c < out_dim; ++c) {
        y[c] /= total;
    }
    return y;
}

/**
 * Embed a whole dataset row by row. The dataset need not be the training
 * data; any point with the prototypes' dimensionality can be mapped.
 */
inline EmbeddingResult embed_dataset(const Dataset& data, const ReferencePairs& pairs,
                                     double power = 2.0, const DistanceSpec& dist = {}, size_t top_q = 0) {
    pairs.validate();
    if (data.dims() != pairs.sources.cols()) {
        throw ShapeError("data dimensionality " + std::to_string(data.dims()) + " does not match reference dimensionality " + std::to_string(pairs.sources.cols()));
    }
    const size_t out_dim = pairs.targets.cols();
    EmbeddingResult result;
    result.coords = Matrix(data.n(), out_dim);
    for (size_t i = 0; i < data.n(); ++i) {
        const std::vector<double> y = shepard_embed(data.points.row(i), data.dims(), pairs, power, dist, top_q);
        for (size_t c = 0; c < out_dim; ++c) {
            result.coords(i, c) = y[c];
        }
    }
    return result;
}

} // namespace xim

#endif
