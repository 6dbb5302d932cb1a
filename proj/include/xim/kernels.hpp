#ifndef XIM_KERNELS_HPP
#define XIM_KERNELS_HPP

#include <cmath>
#include <string>
#include <vector>

#include "core.hpp"

/**
 * @file kernels.hpp
 *
 * @brief Neighborhood cooperativity functions for the ordering and
 * exploration spaces, plus per-sample bandwidth adaptation.
 */

namespace xim {

/** Cooperativity families. */
enum class KernelFamily { GAUSSIAN, STUDENT_T, CAUCHY_LORENTZ };

inline const char* kernel_family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::GAUSSIAN: return "gaussian";
        case KernelFamily::STUDENT_T: return "student_t";
        default: return "cauchy_lorentz";
    }
}

/**
 * @brief A cooperativity function: family plus bandwidth.
 *
 * All families map distance 0 to 1 and decrease monotonically. Distances fed
 * to a kernel are squared distances throughout the library; no square root is
 * ever taken. The Student-t bandwidth doubles as the degrees-of-freedom
 * parameter and may be any positive real.
 */
struct KernelSpec {
    KernelFamily family = KernelFamily::GAUSSIAN;
    double bandwidth = 1.0;

    void validate() const {
        if (!(bandwidth > 0) || !std::isfinite(bandwidth)) {
            throw ConfigError("kernel bandwidth must be a positive finite number");
        }
    }

    static KernelSpec gaussian(double b) { return KernelSpec{KernelFamily::GAUSSIAN, b}; }
    static KernelSpec student_t(double b) { return KernelSpec{KernelFamily::STUDENT_T, b}; }
    static KernelSpec cauchy_lorentz(double b) { return KernelSpec{KernelFamily::CAUCHY_LORENTZ, b}; }

    /// Same family, different bandwidth (used while annealing).
    KernelSpec with_bandwidth(double b) const { return KernelSpec{family, b}; }
};

namespace internal {

/// Kernel evaluation without argument checks, for hot loops.
inline double kernel_value(KernelFamily family, double bandwidth, double dist) {
    switch (family) {
        case KernelFamily::GAUSSIAN:
            return std::exp(-dist / (2.0 * bandwidth * bandwidth));
        case KernelFamily::STUDENT_T:
            return std::pow(1.0 + dist / bandwidth, -(bandwidth + 1.0) / 2.0);
        default:  // Cauchy-Lorentz
            return 1.0 / (1.0 + dist / (bandwidth * bandwidth));
    }
}

} // namespace internal

/**
 * Evaluate a cooperativity kernel at a nonnegative (squared) distance.
 *
 * gaussian:       exp(-dist / 2 b^2)
 * student_t:      (1 + dist / b)^(-(b + 1) / 2)
 * cauchy_lorentz: (1 + dist / b^2)^(-1)
 *
 * Returns a value in (0, 1], monotonically nonincreasing in dist.
 */
inline double kernel_eval(const KernelSpec& spec, double dist) {
    spec.validate();
    if (dist < 0 || !std::isfinite(dist)) {
        throw DomainError("kernel distance must be finite and nonnegative");
    }
    return internal::kernel_value(spec.family, spec.bandwidth, dist);
}

/** Per-sample bandwidth selection strategies for the data-space kernel. */
enum class BandwidthMode { GLOBAL, KNN_BALL, PERPLEXITY };

inline const char* bandwidth_mode_name(BandwidthMode m) {
    switch (m) {
        case BandwidthMode::GLOBAL: return "global";
        case BandwidthMode::KNN_BALL: return "knn";
        default: return "perplexity";
    }
}

/**
 * @brief How the data-space bandwidth gamma is chosen.
 *
 * GLOBAL uses one annealed gamma for the whole dataset. KNN_BALL gives every
 * sample the distance to its k-th nearest neighbor. PERPLEXITY solves for a
 * per-sample gamma whose Gaussian affinity entropy matches a target.
 */
struct BandwidthPolicy {
    BandwidthMode mode = BandwidthMode::GLOBAL;
    size_t k = 0;              ///< neighbor count for KNN_BALL
    double perplexity = 0;     ///< target for PERPLEXITY
    std::vector<double> per_sample;  ///< populated gamma_i values, when applicable

    void validate(size_t n) const {
        if (mode == BandwidthMode::KNN_BALL && (k < 1 || k > n - 1)) {
            throw ConfigError("knn bandwidth requires 1 <= k <= N-1");
        }
        if (mode == BandwidthMode::PERPLEXITY && !(perplexity > 1 && perplexity < static_cast<double>(n))) {
            throw ConfigError("perplexity must lie strictly between 1 and N");
        }
        for (double g : per_sample) {
            if (!(g > 0)) {
                throw ConfigError("per-sample bandwidths must be positive");
            }
        }
    }
};

/**
 * Per-sample bandwidths from the k-nearest-neighbor rule: gamma_i is the
 * distance from x_i to its k-th nearest neighbor (self excluded) under
 * @p dist. Exact duplicates would give gamma = 0, so values are floored at
 * 1e-12.
 */
inline std::vector<double> bandwidths_knn(const Dataset& data, const DistanceSpec& dist, size_t k) {
    const size_t n = data.n();
    if (k < 1 || k > n - 1) {
        throw ConfigError("bandwidths_knn requires 1 <= k <= N-1, got k=" + std::to_string(k));
    }
    std::vector<double> gammas(n);
    std::vector<double> row(n - 1);
    for (size_t i = 0; i < n; ++i) {
        size_t m = 0;
        for (size_t j = 0; j < n; ++j) {
            if (j != i) {
                row[m++] = dist.between_items(data, i, j);
            }
        }
        std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
        gammas[i] = std::max(row[k - 1], 1e-12);
    }
    return gammas;
}

/** Result of the perplexity calibration: bandwidths plus convergence flags. */
struct PerplexityResult {
    std::vector<double> gammas;
    std::vector<bool> converged;  ///< per sample; last iterate kept on failure

    bool all_converged() const {
        for (bool c : converged) {
            if (!c) {
                return false;
            }
        }
        return true;
    }
};

/**
 * Per-sample bandwidths via the perplexity rule: for each sample, bisect on
 * gamma_i until the entropy H_i of the normalized Gaussian affinities
 * p(j|i) ~ exp(-dist(x_i, x_j) / 2 gamma_i^2) satisfies
 * |2^H_i - perplexity| <= 1e-4, using at most 64 bisection steps.
 */
inline PerplexityResult bandwidths_perplexity(const Dataset& data, const DistanceSpec& dist, double perplexity) {
    const size_t n = data.n();
    if (!(perplexity > 1) || !(perplexity < static_cast<double>(n))) {
        throw ConfigError("perplexity must lie strictly between 1 and N");
    }
    PerplexityResult result;
    result.gammas.resize(n);
    result.converged.assign(n, false);

    std::vector<double> d2(n - 1);
    std::vector<double> p(n - 1);
    const double tol = 1e-4;

    for (size_t i = 0; i < n; ++i) {
        size_t m = 0;
        for (size_t j = 0; j < n; ++j) {
            if (j != i) {
                d2[m++] = dist.between_items(data, i, j);
            }
        }

        auto effective_neighbors = [&](double gamma) {
            // 2^H of the affinities at this gamma, computed with a shifted
            // exponent so tight gammas do not underflow everything to zero.
            const double inv = 1.0 / (2.0 * gamma * gamma);
            double dmin = d2[0];
            for (size_t j = 1; j < d2.size(); ++j) {
                dmin = std::min(dmin, d2[j]);
            }
            double sum = 0;
            for (size_t j = 0; j < d2.size(); ++j) {
                p[j] = std::exp(-(d2[j] - dmin) * inv);
                sum += p[j];
            }
            double entropy = 0;  // in bits
            for (size_t j = 0; j < d2.size(); ++j) {
                const double q = p[j] / sum;
                if (q > 0) {
                    entropy -= q * std::log2(q);
                }
            }
            return std::exp2(entropy);
        };

        // Bracket the target, then bisect.
        double lo = 1e-12, hi = 1.0;
        while (effective_neighbors(hi) < perplexity && hi < 1e12) {
            hi *= 2;
        }
        double gamma = hi;
        bool ok = std::fabs(effective_neighbors(hi) - perplexity) <= tol;
        for (int step = 0; step < 64 && !ok; ++step) {
            gamma = 0.5 * (lo + hi);
            const double eff = effective_neighbors(gamma);
            if (std::fabs(eff - perplexity) <= tol) {
                ok = true;
                break;
            }
            if (eff > perplexity) {
                hi = gamma;
            } else {
                lo = gamma;
            }
        }
        result.gammas[i] = gamma;
        result.converged[i] = ok;
    }
    return result;
}

} // namespace xim

#endif
