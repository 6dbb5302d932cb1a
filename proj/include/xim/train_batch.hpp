#ifndef XIM_TRAIN_BATCH_HPP
#define XIM_TRAIN_BATCH_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "assignment.hpp"
#include "core.hpp"
#include "kernels.hpp"
#include "train_online.hpp"

/**
 * @file train_batch.hpp
 *
 * @brief Batch fixed-point training, Voronoi-set acceleration of the batch
 * step, and the generalized-median variant for non-metric dissimilarity data.
 */

namespace xim {

/**
 * @brief State carried across batch iterations: prototypes, iteration count,
 * the last per-node movement and the per-node cooperativity denominators.
 */
struct BatchState {
    PrototypeSet prototypes;
    size_t iteration = 0;
    double residual = std::numeric_limits<double>::infinity();  ///< max_j ||w_j_new - w_j_old||
    std::vector<double> denominators;  ///< sum_i f_ij per node
    std::vector<bool> degenerate;      ///< nodes skipped because |sum_i f_ij| fell below 1e-9
};

// Denominator guard for the fixed-point quotient.
inline constexpr double kBatchDenominatorGuard = 1e-9;

namespace internal {

/// Winner node per data point under the requested rule, into out.
inline void batch_winners(const Dataset& data, const PrototypeSet& protos, const Lattice& lattice,
                          const KernelSpec& h, const KernelSpec& g, BestMatchRule rule,
                          std::vector<size_t>& out) {
    const size_t n = data.n();
    const size_t m = protos.m();
    out.resize(n);
    std::vector<double> dists(m), gbuf, scores;
    for (size_t i = 0; i < n; ++i) {
        const double* x = data.points.row(i);
        for (size_t j = 0; j < m; ++j) {
            dists[j] = squared_euclidean(x, protos.w.row(j), data.dims());
        }
        out[i] = select_winner(rule, lattice, h, g.bandwidth, dists, gbuf, scores);
    }
}

} // namespace internal

/**
 * Empirical stationarity residual of the batch fixed point:
 * max_j || (1/N) sum_i f_ij (x_i - w_j) ||, with
 * f_ij = (1 - eta) h(d_O(r*(x_i), r_j)) - eta g(d_E(x_i, w_j)).
 * Zero (up to float error) exactly at a fixed point of the batch iteration.
 */
inline double batch_stationarity_residual(const Dataset& data, const PrototypeSet& protos, const Lattice& lattice,
                                          const KernelSpec& h, const KernelSpec& g, double eta,
                                          BestMatchRule rule = BestMatchRule::MIN_DISTANCE) {
    const size_t n = data.n();
    const size_t m = protos.m();
    const size_t d = data.dims();
    std::vector<size_t> winners;
    internal::batch_winners(data, protos, lattice, h, g, rule, winners);

    double worst = 0;
    std::vector<double> acc(d);
    for (size_t j = 0; j < m; ++j) {
        std::fill(acc.begin(), acc.end(), 0.0);
        const double* wj = protos.w.row(j);
        for (size_t i = 0; i < n; ++i) {
            const double* x = data.points.row(i);
            const double de = squared_euclidean(x, wj, d);
            const double f = (1.0 - eta) * internal::kernel_value(h.family, h.bandwidth, lattice.dist(winners[i], j))
                             - eta * internal::kernel_value(g.family, g.bandwidth, de);
            for (size_t c = 0; c < d; ++c) {
                acc[c] += f * (x[c] - wj[c]);
            }
        }
        double norm = 0;
        for (size_t c = 0; c < d; ++c) {
            norm += acc[c] * acc[c];
        }
        worst = std::max(worst, std::sqrt(norm) / static_cast<double>(n));
    }
    return worst;
}

/**
 * One batch fixed-point iteration: recompute winners, then move every node
 * to the f-weighted mean of the data, damped by @p damping. Nodes whose
 * cooperativity sum falls below the guard are left in place and flagged.
 */
inline BatchState batch_xim_iterate(const Dataset& data, BatchState state, const Lattice& lattice,
                                    const KernelSpec& h, const KernelSpec& g, const DistanceSpec& dist,
                                    double eta, double damping = 0.5,
                                    BestMatchRule rule = BestMatchRule::MIN_DISTANCE) {
    if (dist.kind != DistanceKind::SQUARED_EUCLIDEAN) {
        throw ConfigError("batch XIM requires vectorial squared Euclidean data");
    }
    if (!(damping > 0 && damping <= 1)) {
        throw ConfigError("damping must lie in (0, 1]");
    }
    const size_t n = data.n();
    const size_t m = state.prototypes.m();
    const size_t d = data.dims();
    if (state.prototypes.dims() != d) {
        throw ShapeError("prototype dimensionality does not match the data");
    }
    if (lattice.m() != m) {
        throw ShapeError("lattice and prototype set disagree on node count");
    }

    std::vector<size_t> winners;
    internal::batch_winners(data, state.prototypes, lattice, h, g, rule, winners);

    Matrix numer(m, d);
    state.denominators.assign(m, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const double* x = data.points.row(i);
        const size_t wi = winners[i];
        for (size_t j = 0; j < m; ++j) {
            const double de = squared_euclidean(x, state.prototypes.w.row(j), d);
            const double f = (1.0 - eta) * internal::kernel_value(h.family, h.bandwidth, lattice.dist(wi, j))
                             - eta * internal::kernel_value(g.family, g.bandwidth, de);
            state.denominators[j] += f;
            double* nrow = numer.row(j);
            for (size_t c = 0; c < d; ++c) {
                nrow[c] += f * x[c];
            }
        }
    }

    state.degenerate.assign(m, false);
    double residual = 0;
    for (size_t j = 0; j < m; ++j) {
        if (std::fabs(state.denominators[j]) < kBatchDenominatorGuard) {
            state.degenerate[j] = true;
            continue;
        }
        double* wj = state.prototypes.w.row(j);
        const double* nrow = numer.row(j);
        double move2 = 0;
        for (size_t c = 0; c < d; ++c) {
            const double target = nrow[c] / state.denominators[j];
            const double next = (1.0 - damping) * wj[c] + damping * target;
            const double delta = next - wj[c];
            move2 += delta * delta;
            wj[c] = next;
        }
        residual = std::max(residual, std::sqrt(move2));
    }
    state.residual = residual;
    state.iteration += 1;
    return state;
}

/**
 * Voronoi-aggregated batch step. Data is first partitioned by winner node;
 * the h-weighted part of the fixed-point sums then aggregates per cell
 * instead of per point (h depends only on the winner cell). The g part is
 * inherently per-point. Numerically equal to batch_xim_iterate up to
 * summation order.
 */
inline BatchState voronoi_batch_step(const Dataset& data, BatchState state, const Lattice& lattice,
                                     const KernelSpec& h, const KernelSpec& g, const DistanceSpec& dist,
                                     double eta, double damping = 0.5,
                                     BestMatchRule rule = BestMatchRule::MIN_DISTANCE) {
    if (dist.kind != DistanceKind::SQUARED_EUCLIDEAN) {
        throw ConfigError("batch XIM requires vectorial squared Euclidean data");
    }
    if (!(damping > 0 && damping <= 1)) {
        throw ConfigError("damping must lie in (0, 1]");
    }
    const size_t n = data.n();
    const size_t m = state.prototypes.m();
    const size_t d = data.dims();
    if (state.prototypes.dims() != d) {
        throw ShapeError("prototype dimensionality does not match the data");
    }
    if (lattice.m() != m) {
        throw ShapeError("lattice and prototype set disagree on node count");
    }

    std::vector<size_t> winners;
    internal::batch_winners(data, state.prototypes, lattice, h, g, rule, winners);

    // Per-cell aggregates; empty cells simply contribute nothing.
    Matrix cell_sum(m, d);
    std::vector<double> cell_count(m, 0.0);
    for (size_t i = 0; i < n; ++i) {
        double* srow = cell_sum.row(winners[i]);
        const double* x = data.points.row(i);
        for (size_t c = 0; c < d; ++c) {
            srow[c] += x[c];
        }
        cell_count[winners[i]] += 1.0;
    }

    Matrix numer(m, d);
    state.denominators.assign(m, 0.0);
    for (size_t cell = 0; cell < m; ++cell) {
        if (cell_count[cell] == 0) {
            continue;
        }
        const double* srow = cell_sum.row(cell);
        for (size_t j = 0; j < m; ++j) {
            const double hw = (1.0 - eta) * internal::kernel_value(h.family, h.bandwidth, lattice.dist(cell, j));
            state.denominators[j] += hw * cell_count[cell];
            double* nrow = numer.row(j);
            for (size_t c = 0; c < d; ++c) {
                nrow[c] += hw * srow[c];
            }
        }
    }
    for (size_t i = 0; i < n; ++i) {
        const double* x = data.points.row(i);
        for (size_t j = 0; j < m; ++j) {
            const double de = squared_euclidean(x, state.prototypes.w.row(j), d);
            const double gw = eta * internal::kernel_value(g.family, g.bandwidth, de);
            state.denominators[j] -= gw;
            double* nrow = numer.row(j);
            for (size_t c = 0; c < d; ++c) {
                nrow[c] -= gw * x[c];
            }
        }
    }

    state.degenerate.assign(m, false);
    double residual = 0;
    for (size_t j = 0; j < m; ++j) {
        if (std::fabs(state.denominators[j]) < kBatchDenominatorGuard) {
            state.degenerate[j] = true;
            continue;
        }
        double* wj = state.prototypes.w.row(j);
        const double* nrow = numer.row(j);
        double move2 = 0;
        for (size_t c = 0; c < d; ++c) {
            const double target = nrow[c] / state.denominators[j];
            const double next = (1.0 - damping) * wj[c] + damping * target;
            const double delta = next - wj[c];
            move2 += delta * delta;
            wj[c] = next;
        }
        residual = std::max(residual, std::sqrt(move2));
    }
    state.residual = residual;
    state.iteration += 1;
    return state;
}

/** Convergence report of a batch training run. */
struct BatchReport {
    size_t iterations = 0;
    bool converged = false;
    double final_residual = std::numeric_limits<double>::infinity();
    double stationarity_residual = std::numeric_limits<double>::infinity();
};

/** Output of batch training. */
struct BatchResult {
    PrototypeSet prototypes;
    BatchReport report;
    TrainConfig resolved;
};

/**
 * Batch XIM training: iterate the damped fixed point, annealing sigma and
 * gamma per outer iteration, until the per-node movement drops below
 * @p tol or @p max_iters is reached. The report carries both the movement
 * residual and the empirical stationarity residual of the final state.
 */
inline BatchResult batch_xim_train(const Dataset& data, const Lattice& lattice, const TrainConfig& config_in,
                                   double tol, size_t max_iters, double damping = 0.5) {
    if (!(tol > 0)) {
        throw ConfigError("batch tolerance must be positive");
    }
    TrainConfig config = resolve_config(config_in, data, lattice);
    const KernelFamily h_family = ordering_family_for(config.method);

    SplitMix64 root(config.seed);
    SplitMix64 init_rng = root.split();

    BatchResult result;
    result.resolved = config;

    BatchState state;
    state.prototypes = init_prototypes(data, lattice, config.init, init_rng);

    const size_t horizon = std::max<size_t>(max_iters, 1);
    const AnnealSchedule sig_sched{config.sigma.start, config.sigma.end, horizon};
    const AnnealSchedule gam_sched{config.gamma.start, config.gamma.end, horizon};

    KernelSpec h{h_family, config.sigma.start};
    KernelSpec g{KernelFamily::GAUSSIAN, config.gamma.start};
    const DistanceSpec dist;

    for (size_t it = 0; it < max_iters; ++it) {
        h.bandwidth = anneal(sig_sched, it);
        g.bandwidth = anneal(gam_sched, it);
        state = batch_xim_iterate(data, std::move(state), lattice, h, g, dist, config.eta, damping, config.best_match);
        if (state.residual < tol) {
            result.report.converged = true;
            break;
        }
    }

    result.report.iterations = state.iteration;
    result.report.final_residual = state.residual;
    result.report.stationarity_residual = batch_stationarity_residual(data, state.prototypes, lattice, h, g, config.eta, config.best_match);
    result.prototypes = std::move(state.prototypes);
    return result;
}

/** Candidate pools for the generalized-median update. */
enum class MedianCandidates { ALL, VORONOI };

/**
 * @brief State of the median trainer: the chosen median item per node, the
 * assignment it was computed from, and the minimized per-node weighted cost.
 */
struct MedianState {
    std::vector<size_t> median;       ///< per node: index of the generalized-median item
    std::vector<size_t> prev_median;  ///< medians that defined f for the last update
    std::vector<size_t> winners;      ///< per item: winner node of the last assignment
    std::vector<double> cost;         ///< per node: minimized weighted dissimilarity sum
    size_t iterations = 0;
    bool converged = false;
};

/**
 * Median XIM for non-metric data: alternate (1) best-match assignment of
 * every item against the current medians and (2) per-node generalized-median
 * updates weighted by the cooperativity f = h - g, until assignments stop
 * changing or @p max_iters is reached.
 *
 * The best match defaults to the GKL rule on g(diss(i, median_j)); the
 * simpler minimal-distance rule may be substituted. Ties in the median
 * argmin resolve to the lowest item index.
 */
inline MedianState median_xim_train(const DissimilarityMatrix& diss, const Lattice& lattice,
                                    const KernelSpec& h, const KernelSpec& g,
                                    BestMatchRule rule = BestMatchRule::GKL,
                                    MedianCandidates candidates = MedianCandidates::ALL,
                                    size_t max_iters = 100) {
    const size_t n = diss.n();
    const size_t m = lattice.m();
    if (n < 1) {
        throw ConfigError("median XIM needs at least one data item");
    }
    if (rule == BestMatchRule::HESKES) {
        throw ConfigError("median XIM supports the gkl and min_distance best-match rules");
    }
    h.validate();
    g.validate();

    MedianState state;
    state.median.resize(m);
    for (size_t j = 0; j < m; ++j) {
        state.median[j] = (j * n) / m;  // deterministic spread over the items
    }
    state.prev_median = state.median;
    state.cost.assign(m, 0.0);
    state.winners.assign(n, 0);

    std::vector<size_t> prev_winners;
    std::vector<double> gvec(m);
    Matrix f(n, m);

    for (size_t iter = 0; iter < max_iters; ++iter) {
        // (1) assignment against current medians
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < m; ++j) {
                gvec[j] = internal::kernel_value(g.family, g.bandwidth, diss.values(i, state.median[j]));
            }
            if (rule == BestMatchRule::GKL) {
                state.winners[i] = best_match_gkl_from_g(gvec, lattice, h).winner;
            } else {
                size_t best = 0;
                for (size_t j = 1; j < m; ++j) {
                    if (diss.values(i, state.median[j]) < diss.values(i, state.median[best])) {
                        best = j;
                    }
                }
                state.winners[i] = best;
            }
        }
        if (iter > 0 && state.winners == prev_winners) {
            state.converged = true;
            break;
        }
        prev_winners = state.winners;

        // (2) f-weighted generalized-median update
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < m; ++j) {
                f(i, j) = internal::kernel_value(h.family, h.bandwidth, lattice.dist(state.winners[i], j))
                          - internal::kernel_value(g.family, g.bandwidth, diss.values(i, state.median[j]));
            }
        }
        state.prev_median = state.median;
        for (size_t j = 0; j < m; ++j) {
            double best_cost = std::numeric_limits<double>::infinity();
            size_t best_item = state.median[j];
            bool any = false;
            for (size_t c = 0; c < n; ++c) {
                if (candidates == MedianCandidates::VORONOI && state.winners[c] != j) {
                    continue;
                }
                double acc = 0;
                for (size_t i = 0; i < n; ++i) {
                    acc += f(i, j) * diss.values(i, c);
                }
                if (!any || acc < best_cost) {
                    best_cost = acc;
                    best_item = c;
                    any = true;
                }
            }
            if (any) {
                state.median[j] = best_item;
                state.cost[j] = best_cost;
            }
            // empty Voronoi candidate pool: median stays put
        }
        state.iterations = iter + 1;
    }
    return state;
}

} // namespace xim

#endif
