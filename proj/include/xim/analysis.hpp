#ifndef XIM_ANALYSIS_HPP
#define XIM_ANALYSIS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "assignment.hpp"
#include "core.hpp"
#include "kernels.hpp"
#include "mapping.hpp"
#include "pca.hpp"
#include "train_batch.hpp"
#include "train_online.hpp"

/**
 * @file analysis.hpp
 *
 * @brief Embedding-quality metrics (Sammon error, Spearman's rho,
 * trustworthiness, continuity, silhouette), the cost evaluator, the PCA
 * baseline embedder, and the subsampled evaluation protocol.
 */

namespace xim {

/** @brief Cost of a dataset under the GKL best match, per sample and total. */
struct CostBreakdown {
    double total = 0;
    std::vector<size_t> winner;  ///< per-sample best-match node
    std::vector<double> score;   ///< per-sample GKL score (>= 0 up to float error)
};

/**
 * Evaluate the empirical cost: every sample is assigned its GKL best-match
 * node and contributes that node's GKL score; the total is the sum over the
 * dataset (the uniform empirical measure standing in for p(x)).
 */
inline CostBreakdown xim_cost(const Dataset& data, const PrototypeSet& protos, const Lattice& lattice,
                              const KernelSpec& h, const KernelSpec& g, const DistanceSpec& dist = {}) {
    CostBreakdown out;
    out.winner.resize(data.n());
    out.score.resize(data.n());
    for (size_t i = 0; i < data.n(); ++i) {
        const NodeScoreVector scores = best_match_gkl(data.points.row(i), data.dims(), protos, lattice, h, g, dist);
        out.winner[i] = scores.winner;
        out.score[i] = scores.scores[scores.winner];
        out.total += out.score[i];
    }
    return out;
}

/** Euclidean distances over all pairs i < j, row-major pair order. */
inline std::vector<double> pairwise_euclidean(const Matrix& points) {
    const size_t n = points.rows();
    std::vector<double> out;
    out.reserve(n * (n - 1) / 2);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            out.push_back(std::sqrt(squared_euclidean(points.row(i), points.row(j), points.cols())));
        }
    }
    return out;
}

/**
 * Sammon stress between matched pairwise distance lists:
 * (1 / sum delta) * sum (delta - d)^2 / delta, where delta are the
 * high-space distances. Pairs with delta below 1e-12 are skipped.
 */
inline double sammon_error(const std::vector<double>& high, const std::vector<double>& low) {
    if (high.size() != low.size()) {
        throw ShapeError("distance lists differ in length");
    }
    double norm = 0, stress = 0;
    bool any = false;
    for (size_t p = 0; p < high.size(); ++p) {
        const double delta = high[p];
        if (delta < 1e-12) {
            continue;
        }
        any = true;
        norm += delta;
        const double diff = delta - low[p];
        stress += diff * diff / delta;
    }
    if (!any) {
        throw DomainError("all high-space distances are zero");
    }
    return stress / norm;
}

namespace internal {

/// Average ranks (1-based), ties averaged.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t(0));
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) {
            ranks[order[k]] = avg;
        }
        i = j + 1;
    }
    return ranks;
}

} // namespace internal

/**
 * Spearman's rho between matched distance lists: the Pearson correlation of
 * their average ranks.
 */
inline double spearman_rho(const std::vector<double>& high, const std::vector<double>& low) {
    if (high.size() != low.size()) {
        throw ShapeError("distance lists differ in length");
    }
    if (high.size() < 2) {
        throw ConfigError("spearman_rho needs at least two pairs");
    }
    const std::vector<double> ra = internal::average_ranks(high);
    const std::vector<double> rb = internal::average_ranks(low);
    const double n = static_cast<double>(ra.size());
    double ma = 0, mb = 0;
    for (size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0, va = 0, vb = 0;
    for (size_t i = 0; i < ra.size(); ++i) {
        const double da = ra[i] - ma;
        const double db = rb[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va == 0 || vb == 0) {
        throw DomainError("correlation undefined for a constant distance list");
    }
    return cov / std::sqrt(va * vb);
}

namespace internal {

/// Neighbor order of every point: others sorted by (distance, index).
inline std::vector<std::vector<size_t>> neighbor_orders(const Matrix& points) {
    const size_t n = points.rows();
    std::vector<std::vector<size_t>> orders(n);
    std::vector<double> d2(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            d2[j] = squared_euclidean(points.row(i), points.row(j), points.cols());
        }
        auto& order = orders[i];
        order.reserve(n - 1);
        for (size_t j = 0; j < n; ++j) {
            if (j != i) {
                order.push_back(j);
            }
        }
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return d2[a] < d2[b] || (d2[a] == d2[b] && a < b);
        });
    }
    return orders;
}

/// ranks[i][j] = 1-based neighbor rank of j with respect to i.
inline std::vector<std::vector<size_t>> neighbor_ranks(const std::vector<std::vector<size_t>>& orders) {
    const size_t n = orders.size();
    std::vector<std::vector<size_t>> ranks(n, std::vector<size_t>(n, 0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t pos = 0; pos < orders[i].size(); ++pos) {
            ranks[i][orders[i][pos]] = pos + 1;
        }
    }
    return ranks;
}

inline void check_tc_k(size_t n, size_t k) {
    if (n < 3) {
        throw ConfigError("trustworthiness/continuity need at least three points");
    }
    if (k < 1 || k > (n - 1) / 2) {
        throw ConfigError("k must lie in [1, floor((N-1)/2)], got k=" + std::to_string(k) + " for N=" + std::to_string(n));
    }
}

} // namespace internal

/**
 * Trustworthiness T(k): penalizes points that are embedding neighbors
 * without being data neighbors, weighted by their data-space rank excess.
 * Value in [0, 1]; 1 means every embedding neighborhood is trustworthy.
 */
inline double trustworthiness(const Matrix& data_points, const Matrix& embedding, size_t k) {
    const size_t n = data_points.rows();
    if (embedding.rows() != n) {
        throw ShapeError("embedding row count does not match the data");
    }
    internal::check_tc_k(n, k);
    const auto high_orders = internal::neighbor_orders(data_points);
    const auto low_orders = internal::neighbor_orders(embedding);
    const auto high_ranks = internal::neighbor_ranks(high_orders);

    double penalty = 0;
    std::vector<char> in_high(n);
    for (size_t i = 0; i < n; ++i) {
        std::fill(in_high.begin(), in_high.end(), 0);
        for (size_t pos = 0; pos < k; ++pos) {
            in_high[high_orders[i][pos]] = 1;
        }
        for (size_t pos = 0; pos < k; ++pos) {
            const size_t j = low_orders[i][pos];
            if (!in_high[j]) {
                // j outside the data-space kNN set implies rank > k
                penalty += static_cast<double>(high_ranks[i][j]) - static_cast<double>(k);
            }
        }
    }
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);
    return 1.0 - 2.0 / (nn * kk * (2.0 * nn - 3.0 * kk - 1.0)) * penalty;
}

/**
 * Continuity C(k): penalizes data neighbors that are lost in the embedding,
 * weighted by their embedding-space rank excess. The exact mirror of
 * trustworthiness with the two spaces swapped.
 */
inline double continuity(const Matrix& data_points, const Matrix& embedding, size_t k) {
    return trustworthiness(embedding, data_points, k);
}

/**
 * Mean silhouette of a labeled embedding: per point, (b - a) / max(a, b)
 * with a the mean intra-cluster distance and b the smallest mean distance to
 * another cluster. Singleton clusters score 0.
 */
inline double silhouette_score(const Matrix& coords, const std::vector<int>& labels) {
    const size_t n = coords.rows();
    if (labels.size() != n) {
        throw ShapeError("label count does not match coordinate rows");
    }
    std::vector<int> distinct(labels);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) {
        throw ConfigError("silhouette needs at least two clusters");
    }

    double total = 0;
    std::vector<double> sum_to(distinct.size());
    std::vector<size_t> count(distinct.size());
    for (size_t c = 0; c < distinct.size(); ++c) {
        count[c] = static_cast<size_t>(std::count(labels.begin(), labels.end(), distinct[c]));
    }
    for (size_t i = 0; i < n; ++i) {
        std::fill(sum_to.begin(), sum_to.end(), 0.0);
        for (size_t j = 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            const double d = std::sqrt(squared_euclidean(coords.row(i), coords.row(j), coords.cols()));
            const size_t c = static_cast<size_t>(std::lower_bound(distinct.begin(), distinct.end(), labels[j]) - distinct.begin());
            sum_to[c] += d;
        }
        const size_t own = static_cast<size_t>(std::lower_bound(distinct.begin(), distinct.end(), labels[i]) - distinct.begin());
        if (count[own] <= 1) {
            continue;  // singleton cluster scores 0
        }
        const double a = sum_to[own] / static_cast<double>(count[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < distinct.size(); ++c) {
            if (c != own && count[c] > 0) {
                b = std::min(b, sum_to[c] / static_cast<double>(count[c]));
            }
        }
        const double denom = std::max(a, b);
        total += (denom > 0) ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

/** PCA embedding plus the per-component explained variance. */
struct PcaEmbedding {
    EmbeddingResult embedding;
    std::vector<double> explained_variance;
};

/**
 * PCA baseline: center the data, extract the top @p d principal axes by
 * deterministic power iteration with deflation, and project.
 */
inline PcaEmbedding pca_embed(const Dataset& data, size_t d) {
    if (d < 1 || d > std::min(data.n() > 1 ? data.n() - 1 : size_t(1), data.dims())) {
        throw ConfigError("pca target dimensionality out of range");
    }
    const PcaModel model = pca_fit(data.points, d);
    PcaEmbedding out;
    out.embedding.coords = pca_project(model, data.points);
    out.embedding.method = method_name(Method::PCA);
    out.explained_variance = model.eigenvalues;
    return out;
}

/** Metric columns of a quality report, in fixed order. */
enum QualityMetric { METRIC_SAMMON = 0, METRIC_SPEARMAN = 1, METRIC_TRUSTWORTHINESS = 2, METRIC_CONTINUITY = 3 };

inline const char* quality_metric_name(size_t i) {
    static const char* names[] = {"sammon", "spearman_rho", "trustworthiness", "continuity"};
    return names[i];
}

/** @brief Per-metric summary of a subsampled evaluation. */
struct QualityReport {
    std::array<double, 4> mean{};
    std::array<double, 4> stddev{};       ///< population formula (divisor = runs)
    Matrix raw;                            ///< runs x 4 per-run values
    size_t runs = 0;
    double fraction = 1.0;
    size_t k_min = 1;
    size_t k_max_requested = 1;
    size_t k_max_used = 1;                 ///< clipped to floor((N_sub - 1) / 2)
    bool k_clipped = false;
};

/** @brief Everything needed to train and embed one method in the protocol. */
struct MethodSetup {
    Method method = Method::C_XIM;
    TrainConfig train;
    size_t rows = 10;
    size_t cols = 10;
    Topology topology = Topology::RECTANGULAR;
    double power = 2.0;          ///< Shepard interpolation power
    size_t top_q = 0;            ///< Shepard truncation (0 = off)
    double damping = 0.5;        ///< batch damping
    double batch_tol = 1e-8;
    size_t batch_max_iters = 100;
    size_t median_max_iters = 100;
    MedianCandidates median_candidates = MedianCandidates::ALL;
    BestMatchRule median_rule = BestMatchRule::GKL;  ///< the median variant's canonical rule
    size_t pca_dims = 2;
};

/** @brief Subsampling protocol parameters. */
struct ProtocolConfig {
    size_t runs = 10;
    double fraction = 0.95;
    size_t k_min = 1;
    size_t k_max = 50;
    uint64_t seed = 1;
};

namespace internal {

/// First `count` indices of a seeded partial Fisher-Yates shuffle, ascending.
inline std::vector<size_t> sample_without_replacement(size_t n, size_t count, SplitMix64& rng) {
    std::vector<size_t> pool(n);
    std::iota(pool.begin(), pool.end(), size_t(0));
    for (size_t i = 0; i < count; ++i) {
        const size_t j = i + rng.next_index(n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

inline Dataset subset_dataset(const Dataset& data, const std::vector<size_t>& idx) {
    Dataset sub;
    sub.points = Matrix(idx.size(), data.dims());
    for (size_t i = 0; i < idx.size(); ++i) {
        const double* src = data.points.row(idx[i]);
        std::copy(src, src + data.dims(), sub.points.row(i));
    }
    if (!data.labels.empty()) {
        sub.labels.resize(idx.size());
        for (size_t i = 0; i < idx.size(); ++i) {
            sub.labels[i] = data.labels[idx[i]];
        }
    }
    if (!data.ids.empty()) {
        sub.ids.resize(idx.size());
        for (size_t i = 0; i < idx.size(); ++i) {
            sub.ids[i] = data.ids[idx[i]];
        }
    }
    return sub;
}

/// Train/fit one method on a dataset and produce its 2-D (or d-D) embedding.
inline Matrix embed_with_method(const Dataset& data, const MethodSetup& setup, uint64_t seed) {
    if (setup.method == Method::PCA) {
        return pca_embed(data, setup.pca_dims).embedding.coords;
    }

    const Lattice lattice = build_lattice(setup.rows, setup.cols, setup.topology);
    TrainConfig cfg = setup.train;
    cfg.method = setup.method;
    cfg.seed = seed;

    if (setup.method == Method::MEDIAN_XIM) {
        // Vectorial data enters the median variant through its squared
        // Euclidean dissimilarities; each item lands on its winner node.
        const size_t n = data.n();
        Matrix d2(n, n);
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = i + 1; j < n; ++j) {
                const double v = squared_euclidean(data.points.row(i), data.points.row(j), data.dims());
                d2(i, j) = v;
                d2(j, i) = v;
            }
        }
        const DissimilarityMatrix diss = make_dissimilarity(std::move(d2));
        cfg = resolve_config(cfg, data, lattice);
        const KernelSpec h{KernelFamily::GAUSSIAN, cfg.sigma.end};
        const KernelSpec g{KernelFamily::GAUSSIAN, cfg.gamma.end};
        const MedianState state = median_xim_train(diss, lattice, h, g, setup.median_rule, setup.median_candidates, setup.median_max_iters);
        Matrix coords(n, lattice.dims());
        for (size_t i = 0; i < n; ++i) {
            const double* node = lattice.nodes.row(state.winners[i]);
            std::copy(node, node + lattice.dims(), coords.row(i));
        }
        return coords;
    }

    PrototypeSet protos;
    if (setup.method == Method::BATCH_XIM) {
        protos = batch_xim_train(data, lattice, cfg, setup.batch_tol, setup.batch_max_iters, setup.damping).prototypes;
    } else {
        protos = train(data, lattice, cfg).prototypes;
    }
    return embed_dataset(data, reference_pairs(protos, lattice), setup.power, DistanceSpec{}, setup.top_q).coords;
}

} // namespace internal

/**
 * Subsampled evaluation protocol: for each run, draw a uniform subsample
 * without replacement (seeded as seed + run), train the method on it, embed
 * it, and compute Sammon error, Spearman's rho and the mean trustworthiness
 * and continuity over the k range. Reports per-metric mean and population
 * standard deviation over the runs.
 */
inline QualityReport evaluate_protocol(const Dataset& data, const MethodSetup& setup, const ProtocolConfig& proto) {
    data.validate();
    if (proto.runs < 1) {
        throw ConfigError("protocol needs at least one run");
    }
    if (!(proto.fraction > 0 && proto.fraction <= 1)) {
        throw ConfigError("subsample fraction must lie in (0, 1]");
    }
    if (proto.k_min < 1 || proto.k_min > proto.k_max) {
        throw ConfigError("invalid neighbor range");
    }

    const size_t count = std::max<size_t>(3, static_cast<size_t>(std::llround(proto.fraction * static_cast<double>(data.n()))));
    if (count > data.n()) {
        throw ConfigError("subsample larger than the dataset");
    }

    QualityReport report;
    report.runs = proto.runs;
    report.fraction = proto.fraction;
    report.k_min = proto.k_min;
    report.k_max_requested = proto.k_max;
    report.k_max_used = std::min(proto.k_max, (count - 1) / 2);
    report.k_clipped = report.k_max_used != proto.k_max;
    if (report.k_max_used < proto.k_min) {
        throw ConfigError("neighbor range empty after clipping to the subsample size");
    }
    report.raw = Matrix(proto.runs, 4);

    for (size_t run = 0; run < proto.runs; ++run) {
        const uint64_t run_seed = proto.seed + run;
        SplitMix64 rng(run_seed);
        const std::vector<size_t> idx = internal::sample_without_replacement(data.n(), count, rng);
        const Dataset sub = internal::subset_dataset(data, idx);

        const Matrix coords = internal::embed_with_method(sub, setup, run_seed);

        const std::vector<double> high = pairwise_euclidean(sub.points);
        const std::vector<double> low = pairwise_euclidean(coords);
        report.raw(run, METRIC_SAMMON) = sammon_error(high, low);
        report.raw(run, METRIC_SPEARMAN) = spearman_rho(high, low);

        double t_acc = 0, c_acc = 0;
        size_t k_count = 0;
        for (size_t k = proto.k_min; k <= report.k_max_used; ++k) {
            t_acc += trustworthiness(sub.points, coords, k);
            c_acc += continuity(sub.points, coords, k);
            ++k_count;
        }
        report.raw(run, METRIC_TRUSTWORTHINESS) = t_acc / static_cast<double>(k_count);
        report.raw(run, METRIC_CONTINUITY) = c_acc / static_cast<double>(k_count);
    }

    for (size_t metric = 0; metric < 4; ++metric) {
        double mean = 0;
        for (size_t run = 0; run < proto.runs; ++run) {
            mean += report.raw(run, metric);
        }
        mean /= static_cast<double>(proto.runs);
        // population variance via pairwise differences; exactly zero when
        // all runs produced the same value
        double pair_sum = 0;
        for (size_t a = 0; a < proto.runs; ++a) {
            for (size_t b = a + 1; b < proto.runs; ++b) {
                const double dv = report.raw(a, metric) - report.raw(b, metric);
                pair_sum += dv * dv;
            }
        }
        report.mean[metric] = mean;
        report.stddev[metric] = std::sqrt(pair_sum / (static_cast<double>(proto.runs) * static_cast<double>(proto.runs)));
    }
    return report;
}

/** Write the Table-1-style human-readable report: rows = methods, columns = metric mean (std). */
inline void write_report_table(std::ostream& os, const std::vector<std::pair<std::string, QualityReport>>& rows) {
    os << "# quality report: mean (std) per metric; std uses the population divisor (n = runs)\n";
    os << "method";
    for (size_t metric = 0; metric < 4; ++metric) {
        os << '\t' << quality_metric_name(metric);
    }
    os << '\n';
    char buf[64];
    for (const auto& [name, report] : rows) {
        os << name;
        for (size_t metric = 0; metric < 4; ++metric) {
            std::snprintf(buf, sizeof(buf), "%.4f (%.4f)", report.mean[metric], report.stddev[metric]);
            os << '\t' << buf;
        }
        os << '\n';
    }
}

/** Machine-readable variant: one key=value line per cell plus protocol parameters. */
inline void write_report_kv(std::ostream& os, const std::vector<std::pair<std::string, QualityReport>>& rows) {
    for (const auto& [name, report] : rows) {
        os << name << ".runs=" << report.runs << '\n';
        os << name << ".fraction=" << format_double(report.fraction) << '\n';
        os << name << ".k_min=" << report.k_min << '\n';
        os << name << ".k_max=" << report.k_max_used << '\n';
        if (report.k_clipped) {
            os << name << ".k_max_clipped_from=" << report.k_max_requested << '\n';
        }
        for (size_t metric = 0; metric < 4; ++metric) {
            os << name << '.' << quality_metric_name(metric) << ".mean=" << format_double(report.mean[metric]) << '\n';
            os << name << '.' << quality_metric_name(metric) << ".std=" << format_double(report.stddev[metric]) << '\n';
            for (size_t run = 0; run < report.runs; ++run) {
                os << name << '.' << quality_metric_name(metric) << ".run" << run << '=' << format_double(report.raw(run, metric)) << '\n';
            }
        }
    }
}

} // namespace xim

#endif
