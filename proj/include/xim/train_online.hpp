#ifndef XIM_TRAIN_ONLINE_HPP
#define XIM_TRAIN_ONLINE_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "assignment.hpp"
#include "core.hpp"
#include "kernels.hpp"
#include "pca.hpp"

/**
 * @file train_online.hpp
 *
 * @brief Online (stochastic) training: the XIM family update, the SOM
 * baseline, annealing schedules, the pluggable divergence-gradient contract
 * and the full training loop.
 */

namespace xim {

/** Embedding methods understood by the toolkit. */
enum class Method { XIM, T_XIM, C_XIM, SOM, BATCH_XIM, MEDIAN_XIM, PCA };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::XIM: return "xim";
        case Method::T_XIM: return "t-xim";
        case Method::C_XIM: return "c-xim";
        case Method::SOM: return "som";
        case Method::BATCH_XIM: return "batch-xim";
        case Method::MEDIAN_XIM: return "median-xim";
        default: return "pca";
    }
}

inline Method method_from_name(const std::string& name) {
    if (name == "xim") return Method::XIM;
    if (name == "t-xim") return Method::T_XIM;
    if (name == "c-xim") return Method::C_XIM;
    if (name == "som") return Method::SOM;
    if (name == "batch-xim") return Method::BATCH_XIM;
    if (name == "median-xim") return Method::MEDIAN_XIM;
    if (name == "pca") return Method::PCA;
    throw ConfigError("unknown method '" + name + "'");
}

/// Ordering-space kernel family implied by a method tag; only the h family
/// changes across the XIM variants, the data-space kernel stays Gaussian.
inline KernelFamily ordering_family_for(Method m) {
    switch (m) {
        case Method::T_XIM: return KernelFamily::STUDENT_T;
        case Method::C_XIM: return KernelFamily::CAUCHY_LORENTZ;
        default: return KernelFamily::GAUSSIAN;
    }
}

/**
 * @brief Exponential annealing between two positive endpoints:
 * value(t) = start * (end / start)^(t / t_max).
 */
struct AnnealSchedule {
    double start = 1.0;
    double end = 1.0;
    size_t t_max = 1;

    void validate() const {
        if (!(start > 0) || !(end > 0) || !std::isfinite(start) || !std::isfinite(end)) {
            throw ConfigError("annealing endpoints must be positive and finite");
        }
        if (t_max < 1) {
            throw ConfigError("annealing horizon must be at least 1");
        }
    }
};

/** Evaluate an annealing schedule at iteration @p t in [0, t_max]. */
inline double anneal(const AnnealSchedule& sched, size_t t) {
    sched.validate();
    if (t > sched.t_max) {
        throw ConfigError("annealing step " + std::to_string(t) + " exceeds horizon " + std::to_string(sched.t_max));
    }
    if (t == 0) {
        return sched.start;
    }
    if (t == sched.t_max) {
        return sched.end;
    }
    const double exponent = static_cast<double>(t) / static_cast<double>(sched.t_max);
    return sched.start * std::pow(sched.end / sched.start, exponent);
}

/**
 * @brief Derivative of a divergence with respect to the data-space
 * cooperativity g, as a pluggable contract.
 *
 * Only the generalized KL gradient ships; other divergences can be supplied
 * by the caller through this hook.
 */
struct DivergenceGradient {
    std::string id;
    std::function<double(double h, double g)> grad;  ///< dD/dg at (h, g)
};

/** Generalized KL gradient: dD/dg = 1 - h/g (g floored at kGklFloor). */
inline DivergenceGradient gkl_gradient() {
    return DivergenceGradient{"gkl", [](double h, double g) { return 1.0 - h / std::max(g, kGklFloor); }};
}

/** Prototype initialization policies. */
enum class InitPolicy { SAMPLE_JITTER, PCA_PLANE };

inline const char* init_policy_name(InitPolicy p) {
    return p == InitPolicy::SAMPLE_JITTER ? "sample_jitter" : "pca_plane";
}

/** A pair of annealing endpoints; zeros mean "derive a default at resolve time". */
struct ScheduleEndpoints {
    double start = 0;
    double end = 0;

    bool unset() const { return start == 0 && end == 0; }
};

/**
 * @brief Full configuration of a training run.
 *
 * Schedule endpoints left at zero are resolved against the dataset and
 * lattice before training (see resolve_config); everything else has a
 * usable default.
 */
struct TrainConfig {
    Method method = Method::XIM;
    size_t t_max = 10000;
    ScheduleEndpoints epsilon{0.9, 0.01};
    ScheduleEndpoints sigma{0, 0};   ///< default: half the lattice extent down to 0.5
    ScheduleEndpoints gamma{0, 0};   ///< default: squared data diameter / 8 down to the median 1-NN distance
    BandwidthMode bandwidth_mode = BandwidthMode::GLOBAL;
    ScheduleEndpoints knn_k{0, 0};   ///< annealed neighbor count for the knn bandwidth mode
    double perplexity = 0;           ///< target for the perplexity bandwidth mode
    double eta = 0.3;                ///< attractive/repulsive weight, valid range [0, 1]
    bool weighted = true;            ///< eta-weighted forces; false recovers the plain (1, 1) rule
    bool gamma_prefactor = false;    ///< retain the 1/gamma^2 gradient prefactor
    BestMatchRule best_match = BestMatchRule::MIN_DISTANCE;
    uint64_t seed = 1;
    InitPolicy init = InitPolicy::SAMPLE_JITTER;
    size_t log_stride = 0;           ///< 0 disables the training log

    void validate() const {
        if (t_max < 1) {
            throw ConfigError("t_max must be at least 1");
        }
        if (!(eta >= 0 && eta <= 1)) {
            throw ConfigError("eta must lie in [0, 1]");
        }
        auto check = [](const ScheduleEndpoints& s, const char* name) {
            if (!s.unset() && (!(s.start > 0) || !(s.end > 0))) {
                throw ConfigError(std::string(name) + " schedule endpoints must be positive");
            }
        };
        check(epsilon, "epsilon");
        check(sigma, "sigma");
        check(gamma, "gamma");
        check(knn_k, "knn_k");
        if (bandwidth_mode == BandwidthMode::PERPLEXITY && !(perplexity > 1)) {
            throw ConfigError("perplexity bandwidth mode needs a target > 1");
        }
    }
};

namespace internal {

inline double lattice_extent(const Lattice& lattice) {
    double extent = 0;
    for (size_t c = 0; c < lattice.dims(); ++c) {
        double lo = lattice.nodes(0, c), hi = lo;
        for (size_t j = 1; j < lattice.m(); ++j) {
            lo = std::min(lo, lattice.nodes(j, c));
            hi = std::max(hi, lattice.nodes(j, c));
        }
        extent = std::max(extent, hi - lo);
    }
    return extent;
}

inline double squared_data_diameter(const Dataset& data) {
    double diam = 0;
    for (size_t i = 0; i < data.n(); ++i) {
        for (size_t j = i + 1; j < data.n(); ++j) {
            diam = std::max(diam, squared_euclidean(data.points.row(i), data.points.row(j), data.dims()));
        }
    }
    return diam;
}

inline double median_nn_distance(const Dataset& data) {
    const size_t n = data.n();
    if (n < 2) {
        return 1.0;
    }
    std::vector<double> nn(n);
    for (size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < n; ++j) {
            if (j != i) {
                best = std::min(best, squared_euclidean(data.points.row(i), data.points.row(j), data.dims()));
            }
        }
        nn[i] = std::sqrt(best);
    }
    std::nth_element(nn.begin(), nn.begin() + n / 2, nn.end());
    return nn[n / 2];
}

} // namespace internal

/**
 * Fill unset schedule endpoints with data- and lattice-derived defaults and
 * validate the result. Training always operates on a resolved config; the
 * resolved values are echoed into the model file.
 */
inline TrainConfig resolve_config(TrainConfig config, const Dataset& data, const Lattice& lattice) {
    config.validate();
    data.validate();
    if (config.sigma.unset()) {
        const double extent = internal::lattice_extent(lattice);
        config.sigma = {std::max(extent / 2.0, 1.0), 0.5};
    }
    if (config.gamma.unset()) {
        const double start = std::max(internal::squared_data_diameter(data) / 8.0, 1e-8);
        const double end = std::max(internal::median_nn_distance(data), 1e-8);
        config.gamma = {start, end};
    }
    if (config.bandwidth_mode == BandwidthMode::KNN_BALL && config.knn_k.unset()) {
        const double hi = std::max(1.0, static_cast<double>(data.n()) / 10.0);
        config.knn_k = {hi, 1.0};
    }
    if (config.bandwidth_mode == BandwidthMode::PERPLEXITY) {
        if (!(config.perplexity > 1 && config.perplexity < static_cast<double>(data.n()))) {
            throw ConfigError("perplexity must lie strictly between 1 and N");
        }
    }
    config.validate();
    return config;
}

/** Initialize prototypes according to the configured policy. */
inline PrototypeSet init_prototypes(const Dataset& data, const Lattice& lattice, InitPolicy policy, SplitMix64& rng) {
    const size_t m = lattice.m();
    const size_t d = data.dims();
    PrototypeSet protos;
    protos.w = Matrix(m, d);

    if (policy == InitPolicy::SAMPLE_JITTER) {
        // Random data rows plus a small jitter scaled to the per-dimension std.
        std::vector<double> mean(d, 0.0), var(d, 0.0);
        for (size_t i = 0; i < data.n(); ++i) {
            for (size_t c = 0; c < d; ++c) {
                mean[c] += data.points(i, c);
            }
        }
        for (size_t c = 0; c < d; ++c) {
            mean[c] /= static_cast<double>(data.n());
        }
        for (size_t i = 0; i < data.n(); ++i) {
            for (size_t c = 0; c < d; ++c) {
                const double dv = data.points(i, c) - mean[c];
                var[c] += dv * dv;
            }
        }
        for (size_t c = 0; c < d; ++c) {
            var[c] = std::sqrt(var[c] / static_cast<double>(data.n()));
        }
        for (size_t j = 0; j < m; ++j) {
            const double* src = data.points.row(rng.next_index(data.n()));
            for (size_t c = 0; c < d; ++c) {
                protos.w(j, c) = src[c] + 1e-3 * var[c] * rng.next_normal();
            }
        }
        return protos;
    }

    // PCA_PLANE: span the top principal components with grid-aligned placement.
    const size_t q = std::min(lattice.dims(), std::min(d, data.n() > 1 ? data.n() - 1 : size_t(1)));
    PcaModel pca = pca_fit(data.points, q);
    std::vector<double> lo(lattice.dims()), hi(lattice.dims());
    for (size_t c = 0; c < lattice.dims(); ++c) {
        lo[c] = hi[c] = lattice.nodes(0, c);
        for (size_t j = 1; j < m; ++j) {
            lo[c] = std::min(lo[c], lattice.nodes(j, c));
            hi[c] = std::max(hi[c], lattice.nodes(j, c));
        }
    }
    for (size_t j = 0; j < m; ++j) {
        for (size_t c = 0; c < d; ++c) {
            protos.w(j, c) = pca.mean[c];
        }
        for (size_t comp = 0; comp < q; ++comp) {
            const double span = hi[comp] - lo[comp];
            const double u = (span > 0) ? 2.0 * (lattice.nodes(j, comp) - lo[comp]) / span - 1.0 : 0.0;
            const double scale = 2.0 * std::sqrt(std::max(pca.eigenvalues[comp], 0.0));
            for (size_t c = 0; c < d; ++c) {
                protos.w(j, c) += u * scale * pca.components(comp, c);
            }
        }
    }
    return protos;
}

namespace internal {

/**
 * In-place XIM update for one data vector. dists[j] must hold d_E(x, w_j)
 * for the current prototypes. wa and wb weight the attractive and repulsive
 * terms; the prefactor flag retains the 1/gamma^2 gradient scale.
 */
inline void xim_update_inplace(Matrix& w, const double* x, const Lattice& lattice, size_t winner,
                               KernelFamily h_family, double sigma, double gamma,
                               const std::vector<double>& dists, double epsilon,
                               double wa, double wb, bool prefactor) {
    const size_t m = w.rows();
    const size_t d = w.cols();
    const double inv_two_g2 = 1.0 / (2.0 * gamma * gamma);
    const double scale = prefactor ? 1.0 / (gamma * gamma) : 1.0;
    for (size_t j = 0; j < m; ++j) {
        const double hj = kernel_value(h_family, sigma, lattice.dist(winner, j));
        const double gj = std::exp(-dists[j] * inv_two_g2);
        const double coef = epsilon * scale * (wa * hj - wb * gj);
        double* row = w.row(j);
        for (size_t c = 0; c < d; ++c) {
            row[c] += coef * (x[c] - row[c]);
        }
    }
}

/// In-place SOM update: w_j moves toward x with weight epsilon * h.
inline void som_update_inplace(Matrix& w, const double* x, const Lattice& lattice, size_t winner,
                               KernelFamily h_family, double sigma, double epsilon) {
    const size_t m = w.rows();
    const size_t d = w.cols();
    for (size_t j = 0; j < m; ++j) {
        const double coef = epsilon * kernel_value(h_family, sigma, lattice.dist(winner, j));
        double* row = w.row(j);
        for (size_t c = 0; c < d; ++c) {
            row[c] += coef * (x[c] - row[c]);
        }
    }
}

/// Winner selection into preallocated buffers; returns the winning index.
inline size_t select_winner(BestMatchRule rule, const Lattice& lattice, const KernelSpec& h, double gamma,
                            const std::vector<double>& dists, std::vector<double>& gbuf, std::vector<double>& scores) {
    const size_t m = dists.size();
    if (rule == BestMatchRule::MIN_DISTANCE) {
        size_t best = 0;
        for (size_t j = 1; j < m; ++j) {
            if (dists[j] < dists[best]) {
                best = j;
            }
        }
        return best;
    }
    scores.assign(m, 0.0);
    if (rule == BestMatchRule::HESKES) {
        for (size_t k = 0; k < m; ++k) {
            double acc = 0;
            for (size_t j = 0; j < m; ++j) {
                acc += kernel_value(h.family, h.bandwidth, lattice.dist(k, j)) * dists[j];
            }
            scores[k] = acc;
        }
    } else {
        gbuf.resize(m);
        const double inv_two_g2 = 1.0 / (2.0 * gamma * gamma);
        for (size_t j = 0; j < m; ++j) {
            gbuf[j] = std::exp(-dists[j] * inv_two_g2);
        }
        for (size_t i = 0; i < m; ++i) {
            scores[i] = gkl_candidate_score(lattice, h, i, gbuf);
        }
    }
    return argmin(scores);
}

} // namespace internal

/**
 * One online XIM update for data vector x, given the winning node.
 *
 * With weighted = true the attractive and repulsive forces carry weights
 * (1 - eta) and eta; with weighted = false both weights are 1, recovering
 * the plain squared-Euclidean learning rule (gradient prefactor omitted).
 */
inline PrototypeSet xim_step(const double* x, size_t dim, const PrototypeSet& protos, const Lattice& lattice,
                             size_t winner, const KernelSpec& h, const KernelSpec& g, double epsilon,
                             double eta, bool weighted = true) {
    internal::check_vector_shape(protos, dim);
    if (lattice.m() != protos.m()) {
        throw ShapeError("lattice and prototype set disagree on node count");
    }
    if (winner >= protos.m()) {
        throw ConfigError("winner index out of range");
    }
    if (g.family != KernelFamily::GAUSSIAN) {
        throw ConfigError("the online update requires a Gaussian data-space kernel");
    }
    h.validate();
    g.validate();
    if (!(epsilon > 0)) {
        throw ConfigError("epsilon must be positive");
    }
    if (!(eta >= 0 && eta <= 1)) {
        throw ConfigError("eta must lie in [0, 1]");
    }

    PrototypeSet out = protos;
    std::vector<double> dists(protos.m());
    for (size_t j = 0; j < protos.m(); ++j) {
        dists[j] = squared_euclidean(x, protos.w.row(j), dim);
    }
    const double wa = weighted ? (1.0 - eta) : 1.0;
    const double wb = weighted ? eta : 1.0;
    internal::xim_update_inplace(out.w, x, lattice, winner, h.family, h.bandwidth, g.bandwidth, dists, epsilon, wa, wb, false);
    return out;
}

/**
 * One online update through the divergence-gradient contract:
 * delta w_j = div(h^*j, g^j) * dg^j/dw_j, applied as w <- w - epsilon * delta.
 * Requires a Gaussian data-space kernel and squared Euclidean distances (the
 * only combination whose chain rule is built in).
 */
inline PrototypeSet xim_step_general(const double* x, size_t dim, const PrototypeSet& protos, const Lattice& lattice,
                                     size_t winner, const KernelSpec& h, const KernelSpec& g, const DistanceSpec& dist,
                                     const DivergenceGradient& div, double epsilon) {
    internal::check_vector_shape(protos, dim);
    if (lattice.m() != protos.m()) {
        throw ShapeError("lattice and prototype set disagree on node count");
    }
    if (winner >= protos.m()) {
        throw ConfigError("winner index out of range");
    }
    if (g.family != KernelFamily::GAUSSIAN) {
        throw ConfigError("xim_step_general supports only a Gaussian data-space kernel");
    }
    if (dist.kind != DistanceKind::SQUARED_EUCLIDEAN) {
        throw ConfigError("xim_step_general requires squared Euclidean distances");
    }
    if (!div.grad) {
        throw ConfigError("divergence gradient is not set");
    }
    h.validate();
    g.validate();

    PrototypeSet out = protos;
    const double gamma2 = g.bandwidth * g.bandwidth;
    for (size_t j = 0; j < protos.m(); ++j) {
        const double de = squared_euclidean(x, protos.w.row(j), dim);
        const double hj = internal::kernel_value(h.family, h.bandwidth, lattice.dist(winner, j));
        const double gj = std::max(internal::kernel_value(KernelFamily::GAUSSIAN, g.bandwidth, de), kGklFloor);
        // dg/dw = -g/(2 gamma^2) * dd_E/dw = g/gamma^2 * (x - w)
        const double coef = -epsilon * div.grad(hj, gj) * gj / gamma2;
        double* row = out.w.row(j);
        for (size_t c = 0; c < dim; ++c) {
            row[c] += coef * (x[c] - row[c]);
        }
    }
    return out;
}

/** One online SOM update: w_j <- w_j + epsilon h(d_O(r*, r_j)) (x - w_j). */
inline PrototypeSet som_step(const double* x, size_t dim, const PrototypeSet& protos, const Lattice& lattice,
                             size_t winner, const KernelSpec& h, double epsilon) {
    internal::check_vector_shape(protos, dim);
    if (lattice.m() != protos.m()) {
        throw ShapeError("lattice and prototype set disagree on node count");
    }
    if (winner >= protos.m()) {
        throw ConfigError("winner index out of range");
    }
    h.validate();
    PrototypeSet out = protos;
    internal::som_update_inplace(out.w, x, lattice, winner, h.family, h.bandwidth, epsilon);
    return out;
}

/** One row of the training log. */
struct TrainLogRow {
    size_t t;
    double epsilon;
    double sigma;
    double gamma;
    size_t winner;
};

/** Output of a training run. */
struct TrainResult {
    PrototypeSet prototypes;
    std::vector<TrainLogRow> log;
    TrainConfig resolved;  ///< config with all defaults filled in
};

/**
 * Run the online training loop: draw a data vector uniformly at random,
 * select the best-match node under the configured rule, and update all
 * prototypes, annealing epsilon, sigma and gamma (or the neighbor count k in
 * the knn bandwidth mode) exponentially over t_max iterations. Deterministic
 * for a fixed seed.
 */
inline TrainResult train(const Dataset& data, const Lattice& lattice, const TrainConfig& config_in) {
    TrainConfig config = resolve_config(config_in, data, lattice);
    if (config.method != Method::XIM && config.method != Method::T_XIM && config.method != Method::C_XIM && config.method != Method::SOM) {
        throw ConfigError(std::string("method '") + method_name(config.method) + "' is not an online method");
    }

    const size_t n = data.n();
    const size_t m = lattice.m();
    const size_t dim = data.dims();
    const KernelFamily h_family = ordering_family_for(config.method);

    SplitMix64 root(config.seed);
    SplitMix64 init_rng = root.split();
    SplitMix64 draw_rng = root.split();

    TrainResult result;
    result.resolved = config;
    result.prototypes = init_prototypes(data, lattice, config.init, init_rng);
    Matrix& w = result.prototypes.w;

    const AnnealSchedule eps_sched{config.epsilon.start, config.epsilon.end, config.t_max};
    const AnnealSchedule sig_sched{config.sigma.start, config.sigma.end, config.t_max};
    const AnnealSchedule gam_sched{config.gamma.start, config.gamma.end, config.t_max};
    const AnnealSchedule knn_sched{config.knn_k.start > 0 ? config.knn_k.start : 1.0,
                                   config.knn_k.end > 0 ? config.knn_k.end : 1.0, config.t_max};

    // Per-sample bandwidths, when requested.
    std::vector<double> per_sample;
    size_t current_k = 0;
    const DistanceSpec sqdist;
    if (config.bandwidth_mode == BandwidthMode::PERPLEXITY) {
        per_sample = bandwidths_perplexity(data, sqdist, config.perplexity).gammas;
    }

    const double wa = config.weighted ? (1.0 - config.eta) : 1.0;
    const double wb = config.weighted ? config.eta : 1.0;

    std::vector<double> dists(m), gbuf, scores;
    for (size_t t = 0; t < config.t_max; ++t) {
        const double epsilon = anneal(eps_sched, t);
        const double sigma = anneal(sig_sched, t);
        double gamma = anneal(gam_sched, t);

        if (config.bandwidth_mode == BandwidthMode::KNN_BALL) {
            const size_t k = std::max<size_t>(1, std::min<size_t>(n - 1, static_cast<size_t>(std::llround(anneal(knn_sched, t)))));
            if (k != current_k) {
                per_sample = bandwidths_knn(data, sqdist, k);
                current_k = k;
            }
        }

        const size_t pick = draw_rng.next_index(n);
        const double* x = data.points.row(pick);
        if (!per_sample.empty()) {
            gamma = per_sample[pick];
        }

        for (size_t j = 0; j < m; ++j) {
            dists[j] = squared_euclidean(x, w.row(j), dim);
        }
        const KernelSpec h{h_family, sigma};
        const size_t winner = internal::select_winner(config.best_match, lattice, h, gamma, dists, gbuf, scores);

        if (config.method == Method::SOM) {
            internal::som_update_inplace(w, x, lattice, winner, h_family, sigma, epsilon);
        } else {
            internal::xim_update_inplace(w, x, lattice, winner, h_family, sigma, gamma, dists, epsilon, wa, wb, config.gamma_prefactor);
        }

        if (config.log_stride > 0 && t % config.log_stride == 0) {
            result.log.push_back(TrainLogRow{t, epsilon, sigma, gamma, winner});
        }
    }
    return result;
}

} // namespace xim

#endif
