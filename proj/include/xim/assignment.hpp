#ifndef XIM_ASSIGNMENT_HPP
#define XIM_ASSIGNMENT_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "core.hpp"
#include "kernels.hpp"

/**
 * @file assignment.hpp
 *
 * @brief Best-match node selection: minimal distance, cooperativity-weighted
 * (Heskes) and generalized Kullback-Leibler scoring.
 */

namespace xim {

/** Best-match scoring rules. */
enum class BestMatchRule { MIN_DISTANCE, HESKES, GKL };

inline const char* best_match_rule_name(BestMatchRule r) {
    switch (r) {
        case BestMatchRule::MIN_DISTANCE: return "min_distance";
        case BestMatchRule::HESKES: return "heskes";
        default: return "gkl";
    }
}

/**
 * @brief Per-node scores for one data vector, with the winning node.
 *
 * The winner is always the lowest-scoring node; ties resolve to the lowest
 * index so that runs are reproducible.
 */
struct NodeScoreVector {
    std::vector<double> scores;
    size_t winner = 0;
    BestMatchRule rule = BestMatchRule::MIN_DISTANCE;
};

// Floor applied to the data-space cooperativity before logarithms and
// divisions; keeps the GKL score finite when g underflows.
inline constexpr double kGklFloor = 1e-300;

/**
 * Generalized KL divergence between two cooperativity values:
 * p ln(p/q) - p + q, with q floored at kGklFloor. Nonnegative for p, q > 0
 * and zero iff p equals q.
 */
inline double gkl_term(double p, double q) {
    const double qf = std::max(q, kGklFloor);
    if (p > 0) {
        return p * (std::log(p) - std::log(qf)) - p + qf;
    }
    return qf;
}

namespace internal {

inline void check_vector_shape(const PrototypeSet& protos, size_t dim) {
    if (protos.m() == 0) {
        throw ConfigError("prototype set is empty");
    }
    if (protos.dims() != dim) {
        throw ShapeError("data dimensionality " + std::to_string(dim) + " does not match prototype dimensionality " + std::to_string(protos.dims()));
    }
}

inline size_t argmin(const std::vector<double>& v) {
    size_t best = 0;
    for (size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[best]) {
            best = i;
        }
    }
    return best;
}

/// d_E(x, w_j) for all j, into out (resized to M).
inline void distances_to_prototypes(const double* x, const PrototypeSet& protos, const DistanceSpec& dist, std::vector<double>& out) {
    const size_t m = protos.m();
    out.resize(m);
    for (size_t j = 0; j < m; ++j) {
        out[j] = dist.between(x, protos.w.row(j), protos.dims());
    }
}

/// GKL score of candidate node i given data cooperativities g[j].
inline double gkl_candidate_score(const Lattice& lattice, const KernelSpec& h, size_t i, const std::vector<double>& g) {
    double score = 0;
    for (size_t j = 0; j < g.size(); ++j) {
        const double hij = kernel_value(h.family, h.bandwidth, lattice.dist(i, j));
        score += gkl_term(hij, g[j]);
    }
    return score;
}

} // namespace internal

/**
 * Minimal-distance best match: scores are the plain exploration-space
 * distances d_E(x, w_j).
 */
inline NodeScoreVector best_match_min_distance(const double* x, size_t dim, const PrototypeSet& protos, const DistanceSpec& dist = {}) {
    internal::check_vector_shape(protos, dim);
    NodeScoreVector out;
    out.rule = BestMatchRule::MIN_DISTANCE;
    internal::distances_to_prototypes(x, protos, dist, out.scores);
    out.winner = internal::argmin(out.scores);
    return out;
}

/**
 * Cooperativity-weighted best match: node k scores
 * sum_j h(d_O(r_k, r_j)) d_E(x, w_j). This is the modified definition that
 * makes the online update an exact gradient of a cost function.
 */
inline NodeScoreVector best_match_heskes(const double* x, size_t dim, const PrototypeSet& protos, const Lattice& lattice, const KernelSpec& h, const DistanceSpec& dist = {}) {
    internal::check_vector_shape(protos, dim);
    if (lattice.m() != protos.m()) {
        throw ShapeError("lattice and prototype set disagree on node count");
    }
    h.validate();
    const size_t m = protos.m();
    std::vector<double> de;
    internal::distances_to_prototypes(x, protos, dist, de);

    NodeScoreVector out;
    out.rule = BestMatchRule::HESKES;
    out.scores.resize(m);
    for (size_t k = 0; k < m; ++k) {
        double score = 0;
        for (size_t j = 0; j < m; ++j) {
            score += internal::kernel_value(h.family, h.bandwidth, lattice.dist(k, j)) * de[j];
        }
        out.scores[k] = score;
    }
    out.winner = internal::argmin(out.scores);
    return out;
}

/**
 * Generalized-KL best match: node i scores the GKL divergence between the
 * node's ordering-space cooperativity profile h^ij and the data-space
 * cooperativity profile g^j of x. Scores are nonnegative up to float error.
 */
inline NodeScoreVector best_match_gkl(const double* x, size_t dim, const PrototypeSet& protos, const Lattice& lattice, const KernelSpec& h, const KernelSpec& g, const DistanceSpec& dist = {}) {
    internal::check_vector_shape(protos, dim);
    if (lattice.m() != protos.m()) {
        throw ShapeError("lattice and prototype set disagree on node count");
    }
    h.validate();
    g.validate();
    const size_t m = protos.m();
    std::vector<double> de;
    internal::distances_to_prototypes(x, protos, dist, de);
    std::vector<double> gj(m);
    for (size_t j = 0; j < m; ++j) {
        gj[j] = internal::kernel_value(g.family, g.bandwidth, de[j]);
    }

    NodeScoreVector out;
    out.rule = BestMatchRule::GKL;
    out.scores.resize(m);
    for (size_t i = 0; i < m; ++i) {
        out.scores[i] = internal::gkl_candidate_score(lattice, h, i, gj);
    }
    out.winner = internal::argmin(out.scores);
    return out;
}

/**
 * GKL best match evaluated on precomputed data cooperativities g[j]; used by
 * the dissimilarity-based (median) trainer where g comes from item-to-median
 * dissimilarities rather than vector distances.
 */
inline NodeScoreVector best_match_gkl_from_g(const std::vector<double>& g, const Lattice& lattice, const KernelSpec& h) {
    if (g.size() != lattice.m()) {
        throw ShapeError("cooperativity vector length does not match node count");
    }
    h.validate();
    NodeScoreVector out;
    out.rule = BestMatchRule::GKL;
    out.scores.resize(g.size());
    for (size_t i = 0; i < g.size(); ++i) {
        out.scores[i] = internal::gkl_candidate_score(lattice, h, i, g);
    }
    out.winner = internal::argmin(out.scores);
    return out;
}

} // namespace xim

#endif
