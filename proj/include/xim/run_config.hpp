#ifndef XIM_RUN_CONFIG_HPP
#define XIM_RUN_CONFIG_HPP

#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "core.hpp"
#include "io.hpp"
#include "train_batch.hpp"
#include "train_online.hpp"

/**
 * @file run_config.hpp
 *
 * @brief The keyed run configuration file: key=value lines with '#'
 * comments. Unknown keys are rejected so typos never pass silently.
 * Command-line overrides reuse the same key set with flags-over-file
 * precedence.
 */

namespace xim {

/** @brief One run configuration driving all CLI commands. */
struct RunConfig {
    Method method = Method::XIM;
    size_t rows = 10;
    size_t cols = 10;
    Topology topology = Topology::RECTANGULAR;
    std::string lattice_file;          ///< explicit node coordinates (overrides rows/cols)
    TrainConfig train;
    bool best_match_set = false;       ///< whether the config assigned best_match explicitly
    double power = 2.0;                ///< Shepard interpolation power
    size_t top_q = 0;                  ///< Shepard truncation, 0 = use all references
    double damping = 0.5;              ///< batch fixed-point damping
    double batch_tol = 1e-8;
    size_t batch_max_iters = 100;
    size_t median_max_iters = 100;
    MedianCandidates median_candidates = MedianCandidates::ALL;
    size_t pca_dims = 2;
    // data loading
    bool has_header = false;
    int label_column = -1;
    // evaluation protocol
    std::vector<Method> eval_methods{Method::SOM, Method::C_XIM, Method::PCA};
    size_t runs = 10;
    double fraction = 0.95;
    size_t k_min = 1;
    size_t k_max = 50;

    Lattice make_lattice() const {
        if (!lattice_file.empty()) {
            return lattice_from_nodes(load_lattice_nodes(lattice_file));
        }
        return build_lattice(rows, cols, topology);
    }

    MethodSetup make_setup() const {
        MethodSetup setup;
        setup.method = method;
        setup.train = train;
        setup.train.method = method;
        setup.rows = rows;
        setup.cols = cols;
        setup.topology = topology;
        setup.power = power;
        setup.top_q = top_q;
        setup.damping = damping;
        setup.batch_tol = batch_tol;
        setup.batch_max_iters = batch_max_iters;
        setup.median_max_iters = median_max_iters;
        setup.median_candidates = median_candidates;
        // the median variant's canonical best match is the GKL rule; an
        // explicit best_match key substitutes it
        setup.median_rule = best_match_set ? train.best_match : BestMatchRule::GKL;
        setup.pca_dims = pca_dims;
        return setup;
    }
};

namespace internal {

inline double parse_number(const std::string& key, const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v)) {
        throw ConfigError("key '" + key + "': cannot parse '" + value + "' as a number");
    }
    return v;
}

inline size_t parse_count(const std::string& key, const std::string& value) {
    const double v = parse_number(key, value);
    if (v < 0 || v != std::floor(v)) {
        throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + value + "'");
    }
    return static_cast<size_t>(v);
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no" || value == "off") {
        return false;
    }
    throw ConfigError("key '" + key + "': expected a boolean, got '" + value + "'");
}

} // namespace internal

/**
 * Apply one key=value assignment. Throws ConfigError naming the key for any
 * unknown key or unparsable value.
 */
inline void apply_config_key(RunConfig& config, const std::string& key, const std::string& value) {
    using internal::parse_bool;
    using internal::parse_count;
    using internal::parse_number;

    if (key == "method") {
        config.method = method_from_name(value);
    } else if (key == "rows") {
        config.rows = parse_count(key, value);
    } else if (key == "cols") {
        config.cols = parse_count(key, value);
    } else if (key == "topology") {
        if (value == "rectangular") {
            config.topology = Topology::RECTANGULAR;
        } else if (value == "hexagonal") {
            config.topology = Topology::HEXAGONAL;
        } else {
            throw ConfigError("key 'topology': expected rectangular or hexagonal, got '" + value + "'");
        }
    } else if (key == "lattice_file") {
        config.lattice_file = value;
    } else if (key == "t_max") {
        config.train.t_max = parse_count(key, value);
    } else if (key == "epsilon_start") {
        config.train.epsilon.start = parse_number(key, value);
    } else if (key == "epsilon_end") {
        config.train.epsilon.end = parse_number(key, value);
    } else if (key == "sigma_start") {
        config.train.sigma.start = parse_number(key, value);
    } else if (key == "sigma_end") {
        config.train.sigma.end = parse_number(key, value);
    } else if (key == "gamma_start") {
        config.train.gamma.start = parse_number(key, value);
    } else if (key == "gamma_end") {
        config.train.gamma.end = parse_number(key, value);
    } else if (key == "bandwidth_mode") {
        if (value == "global") {
            config.train.bandwidth_mode = BandwidthMode::GLOBAL;
        } else if (value == "knn") {
            config.train.bandwidth_mode = BandwidthMode::KNN_BALL;
        } else if (value == "perplexity") {
            config.train.bandwidth_mode = BandwidthMode::PERPLEXITY;
        } else {
            throw ConfigError("key 'bandwidth_mode': expected global, knn or perplexity, got '" + value + "'");
        }
    } else if (key == "knn_k_start") {
        config.train.knn_k.start = parse_number(key, value);
    } else if (key == "knn_k_end") {
        config.train.knn_k.end = parse_number(key, value);
    } else if (key == "perplexity") {
        config.train.perplexity = parse_number(key, value);
    } else if (key == "eta") {
        config.train.eta = parse_number(key, value);
    } else if (key == "weighted") {
        config.train.weighted = parse_bool(key, value);
    } else if (key == "gamma_prefactor") {
        config.train.gamma_prefactor = parse_bool(key, value);
    } else if (key == "best_match") {
        if (value == "min_distance") {
            config.train.best_match = BestMatchRule::MIN_DISTANCE;
        } else if (value == "heskes") {
            config.train.best_match = BestMatchRule::HESKES;
        } else if (value == "gkl") {
            config.train.best_match = BestMatchRule::GKL;
        } else {
            throw ConfigError("key 'best_match': expected min_distance, heskes or gkl, got '" + value + "'");
        }
        config.best_match_set = true;
    } else if (key == "seed") {
        config.train.seed = static_cast<uint64_t>(std::strtoull(value.c_str(), nullptr, 10));
    } else if (key == "init") {
        if (value == "sample_jitter") {
            config.train.init = InitPolicy::SAMPLE_JITTER;
        } else if (value == "pca_plane") {
            config.train.init = InitPolicy::PCA_PLANE;
        } else {
            throw ConfigError("key 'init': expected sample_jitter or pca_plane, got '" + value + "'");
        }
    } else if (key == "log_stride") {
        config.train.log_stride = parse_count(key, value);
    } else if (key == "power") {
        config.power = parse_number(key, value);
    } else if (key == "top_q") {
        config.top_q = parse_count(key, value);
    } else if (key == "damping") {
        config.damping = parse_number(key, value);
    } else if (key == "batch_tol") {
        config.batch_tol = parse_number(key, value);
    } else if (key == "batch_max_iters") {
        config.batch_max_iters = parse_count(key, value);
    } else if (key == "median_max_iters") {
        config.median_max_iters = parse_count(key, value);
    } else if (key == "median_candidates") {
        if (value == "all") {
            config.median_candidates = MedianCandidates::ALL;
        } else if (value == "voronoi") {
            config.median_candidates = MedianCandidates::VORONOI;
        } else {
            throw ConfigError("key 'median_candidates': expected all or voronoi, got '" + value + "'");
        }
    } else if (key == "pca_dims") {
        config.pca_dims = parse_count(key, value);
    } else if (key == "header") {
        config.has_header = parse_bool(key, value);
    } else if (key == "label_column") {
        config.label_column = static_cast<int>(parse_count(key, value));
    } else if (key == "methods") {
        config.eval_methods.clear();
        std::stringstream ss(value);
        std::string name;
        while (std::getline(ss, name, ',')) {
            if (!name.empty()) {
                config.eval_methods.push_back(method_from_name(name));
            }
        }
        if (config.eval_methods.empty()) {
            throw ConfigError("key 'methods': no method names given");
        }
    } else if (key == "runs") {
        config.runs = parse_count(key, value);
    } else if (key == "fraction") {
        config.fraction = parse_number(key, value);
    } else if (key == "k_min") {
        config.k_min = parse_count(key, value);
    } else if (key == "k_max") {
        config.k_max = parse_count(key, value);
    } else {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
}

/** Parse a config stream: key=value per line, '#' comments, unknown keys rejected. */
inline RunConfig read_run_config(std::istream& in) {
    RunConfig config;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        const size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) {
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        }
        auto trim = [](std::string s) {
            const size_t b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) {
                return std::string();
            }
            const size_t e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        apply_config_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    return read_run_config(in);
}

/** Apply key=value overrides (command-line flags) on top of a parsed config. */
inline void apply_overrides(RunConfig& config, const std::vector<std::string>& overrides) {
    for (const std::string& kv : overrides) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("override '" + kv + "' is not of the form key=value");
        }
        apply_config_key(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
}

/** Echo the parts of a resolved config that determine a trained model. */
inline std::vector<std::string> config_echo_lines(const RunConfig& config, const TrainConfig& resolved) {
    std::vector<std::string> echo;
    echo.push_back("t_max=" + std::to_string(resolved.t_max));
    echo.push_back("epsilon=" + format_double(resolved.epsilon.start) + ":" + format_double(resolved.epsilon.end));
    echo.push_back("sigma=" + format_double(resolved.sigma.start) + ":" + format_double(resolved.sigma.end));
    echo.push_back("gamma=" + format_double(resolved.gamma.start) + ":" + format_double(resolved.gamma.end));
    echo.push_back(std::string("bandwidth_mode=") + bandwidth_mode_name(resolved.bandwidth_mode));
    if (resolved.bandwidth_mode == BandwidthMode::KNN_BALL) {
        echo.push_back("knn_k=" + format_double(resolved.knn_k.start) + ":" + format_double(resolved.knn_k.end));
    }
    if (resolved.bandwidth_mode == BandwidthMode::PERPLEXITY) {
        echo.push_back("perplexity=" + format_double(resolved.perplexity));
    }
    echo.push_back("eta=" + format_double(resolved.eta));
    echo.push_back(std::string("weighted=") + (resolved.weighted ? "true" : "false"));
    echo.push_back(std::string("gamma_prefactor=") + (resolved.gamma_prefactor ? "true" : "false"));
    echo.push_back(std::string("best_match=") + best_match_rule_name(resolved.best_match));
    echo.push_back(std::string("init=") + init_policy_name(resolved.init));
    echo.push_back(std::string("topology=") + topology_name(config.topology));
    echo.push_back("power=" + format_double(config.power));
    if (config.method == Method::BATCH_XIM) {
        echo.push_back("damping=" + format_double(config.damping));
        echo.push_back("batch_tol=" + format_double(config.batch_tol));
        echo.push_back("batch_max_iters=" + std::to_string(config.batch_max_iters));
    }
    return echo;
}

} // namespace xim

#endif
