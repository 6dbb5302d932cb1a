#ifndef XIM_CLI_HPP
#define XIM_CLI_HPP

#include <exception>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "core.hpp"
#include "io.hpp"
#include "mapping.hpp"
#include "run_config.hpp"
#include "svg.hpp"
#include "synth.hpp"
#include "train_batch.hpp"
#include "train_online.hpp"

/**
 * @file cli.hpp
 *
 * @brief Command implementations behind the command-line tool. Each command
 * returns a process exit code; the binary in tools/ only parses flags and
 * dispatches here, which keeps the whole surface testable in-process.
 */

namespace xim {
namespace cli {

// Exit codes, one per error class (documented in --help).
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;   ///< unexpected failure
inline constexpr int kExitConfig = 2;     ///< invalid configuration key or value
inline constexpr int kExitData = 3;       ///< unreadable or malformed input data
inline constexpr int kExitShape = 4;      ///< dimension mismatch between inputs
inline constexpr int kExitPlotDim = 5;    ///< plot input is not 2-D

inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) {
        return kExitConfig;
    }
    if (dynamic_cast<const ShapeError*>(&e)) {
        return kExitShape;
    }
    if (dynamic_cast<const Error*>(&e)) {
        return kExitData;  // io / parse / structure / domain
    }
    return kExitInternal;
}

namespace detail {

inline RunConfig load_config_with_overrides(const std::string& config_path, const std::vector<std::string>& overrides) {
    RunConfig config;
    if (!config_path.empty()) {
        config = load_run_config(config_path);
    }
    apply_overrides(config, overrides);
    return config;
}

inline Dataset load_configured_dataset(const std::string& path, const RunConfig& config) {
    LoadOptions options;
    options.has_header = config.has_header;
    options.label_column = config.label_column;
    return load_dataset(path, options);
}

inline double median_offdiagonal(const DissimilarityMatrix& diss) {
    std::vector<double> values;
    values.reserve(diss.n() * (diss.n() - 1));
    for (size_t i = 0; i < diss.n(); ++i) {
        for (size_t j = 0; j < diss.n(); ++j) {
            if (i != j) {
                values.push_back(diss.values(i, j));
            }
        }
    }
    if (values.empty()) {
        return 1.0;
    }
    std::nth_element(values.begin(), values.begin() + values.size() / 2, values.end());
    return values[values.size() / 2];
}

inline void write_train_log(const std::string& path, const std::vector<TrainLogRow>& log) {
    std::ofstream out = internal::open_output(path);
    out << "t,epsilon,sigma,gamma,winner\n";
    for (const TrainLogRow& row : log) {
        out << row.t << ',' << format_double(row.epsilon) << ',' << format_double(row.sigma) << ','
            << format_double(row.gamma) << ',' << row.winner << '\n';
    }
}

} // namespace detail

/**
 * Train a model and write it (plus an optional training log). Prints one
 * summary line: method, node count, iterations and the final cost.
 */
inline int cmd_train(const std::string& data_path, const std::string& config_path, const std::string& model_path,
                     const std::string& log_path, const std::vector<std::string>& overrides,
                     std::ostream& out, std::ostream& err) {
    try {
        RunConfig config = detail::load_config_with_overrides(config_path, overrides);
        if (config.method == Method::PCA) {
            throw ConfigError("method 'pca' has no trainable prototypes; use the evaluate command");
        }

        ModelFile model;
        model.method = method_name(config.method);
        model.seed = config.train.seed;

        if (config.method == Method::MEDIAN_XIM) {
            const DissimilarityMatrix diss = load_dissimilarity(data_path);
            const Lattice lattice = config.make_lattice();
            const double sigma = config.train.sigma.end > 0 ? config.train.sigma.end
                                                            : std::max(internal::lattice_extent(lattice) / 4.0, 0.5);
            const double gamma = config.train.gamma.end > 0 ? config.train.gamma.end
                                                            : std::sqrt(std::max(detail::median_offdiagonal(diss), 1e-12));
            const KernelSpec h{KernelFamily::GAUSSIAN, sigma};
            const KernelSpec g{KernelFamily::GAUSSIAN, gamma};
            const BestMatchRule rule = config.best_match_set ? config.train.best_match : BestMatchRule::GKL;
            const MedianState state = median_xim_train(diss, lattice, h, g, rule, config.median_candidates, config.median_max_iters);

            model.lattice = lattice;
            model.prototypes.w = Matrix(lattice.m(), 0);
            model.medians = state.median;
            model.config_echo.push_back("sigma_end=" + format_double(sigma));
            model.config_echo.push_back("gamma_end=" + format_double(gamma));
            model.config_echo.push_back(std::string("best_match=") + best_match_rule_name(rule));
            save_model(model_path, model);

            double total_cost = 0;
            for (double c : state.cost) {
                total_cost += c;
            }
            out << "method=" << model.method << " M=" << lattice.m() << " iters=" << state.iterations
                << (state.converged ? " converged" : " not-converged") << " cost=" << format_short(total_cost) << '\n';
            return kExitOk;
        }

        const Dataset data = detail::load_configured_dataset(data_path, config);
        const Lattice lattice = config.make_lattice();

        PrototypeSet protos;
        TrainConfig resolved;
        std::vector<TrainLogRow> log;
        if (config.method == Method::BATCH_XIM) {
            TrainConfig cfg = config.train;
            cfg.method = config.method;
            BatchResult result = batch_xim_train(data, lattice, cfg, config.batch_tol, config.batch_max_iters, config.damping);
            protos = std::move(result.prototypes);
            resolved = result.resolved;
        } else {
            TrainConfig cfg = config.train;
            cfg.method = config.method;
            TrainResult result = train(data, lattice, cfg);
            protos = std::move(result.prototypes);
            resolved = result.resolved;
            log = std::move(result.log);
        }

        model.lattice = lattice;
        model.prototypes = protos;
        model.config_echo = config_echo_lines(config, resolved);
        save_model(model_path, model);
        if (!log_path.empty()) {
            detail::write_train_log(log_path, log);
        }

        const KernelSpec h{ordering_family_for(config.method), resolved.sigma.end};
        const KernelSpec g{KernelFamily::GAUSSIAN, resolved.gamma.end};
        const CostBreakdown cost = xim_cost(data, protos, lattice, h, g);
        out << "method=" << model.method << " M=" << lattice.m() << " t_max=" << resolved.t_max
            << " cost=" << format_short(cost.total) << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

/** Embed a dataset (training data or new points) through a trained model. */
inline int cmd_embed(const std::string& model_path, const std::string& data_path, const std::string& out_path,
                     const std::vector<std::string>& overrides, std::ostream& out, std::ostream& err) {
    try {
        RunConfig config;
        apply_overrides(config, overrides);
        const ModelFile model = load_model(model_path);
        if (model.prototypes.dims() == 0) {
            throw ShapeError("model '" + model.method + "' carries no vector prototypes to interpolate through");
        }
        const Dataset data = detail::load_configured_dataset(data_path, config);
        if (data.dims() != model.prototypes.dims()) {
            throw ShapeError("data dimensionality " + std::to_string(data.dims()) + " does not match model dimensionality " + std::to_string(model.prototypes.dims()));
        }
        const EmbeddingResult result = embed_dataset(data, reference_pairs(model.prototypes, model.lattice), config.power, DistanceSpec{}, config.top_q);
        std::ofstream os = internal::open_output(out_path);
        write_embedding(os, result.coords, data.ids, data.labels);
        out << "embedded " << data.n() << " points into " << model.lattice.dims() << " dimensions\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

/**
 * Run the subsampled evaluation protocol for every configured method and
 * write the human table plus the machine-readable key=value report.
 */
inline int cmd_evaluate(const std::string& data_path, const std::string& config_path, const std::string& out_prefix,
                        const std::vector<std::string>& overrides, std::ostream& out, std::ostream& err) {
    try {
        RunConfig config = detail::load_config_with_overrides(config_path, overrides);
        const Dataset data = detail::load_configured_dataset(data_path, config);

        ProtocolConfig proto;
        proto.runs = config.runs;
        proto.fraction = config.fraction;
        proto.k_min = config.k_min;
        proto.k_max = config.k_max;
        proto.seed = config.train.seed;

        std::vector<std::pair<std::string, QualityReport>> rows;
        for (Method method : config.eval_methods) {
            MethodSetup setup = config.make_setup();
            setup.method = method;
            setup.train.method = method;
            rows.emplace_back(method_name(method), evaluate_protocol(data, setup, proto));
        }

        {
            std::ofstream table = internal::open_output(out_prefix + ".txt");
            write_report_table(table, rows);
        }
        {
            std::ofstream kv = internal::open_output(out_prefix + ".kv");
            write_report_kv(kv, rows);
        }
        write_report_table(out, rows);
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

/**
 * Render an embedding file as an SVG scatter. Labels come from the embedding
 * file itself or from an optional one-label-per-line file.
 */
inline int cmd_plot(const std::string& embedding_path, const std::string& labels_path, const std::string& out_path,
                    std::ostream& out, std::ostream& err) {
    try {
        const EmbeddingFile embedding = load_embedding(embedding_path);
        if (embedding.coords.cols() != 2) {
            err << "error: plotting requires a 2-D embedding, got d=" << embedding.coords.cols() << '\n';
            return kExitPlotDim;
        }
        std::vector<int> labels = embedding.labels;
        if (!labels_path.empty()) {
            std::ifstream in = internal::open_input(labels_path);
            labels.clear();
            std::string line;
            size_t row = 0;
            while (std::getline(in, line)) {
                if (internal::blank_or_comment(line)) {
                    continue;
                }
                ++row;
                labels.push_back(static_cast<int>(internal::parse_cell(line, row, 1)));
            }
            if (labels.size() != embedding.coords.rows()) {
                throw ShapeError("label file has " + std::to_string(labels.size()) + " labels for " + std::to_string(embedding.coords.rows()) + " points");
            }
        }
        std::ofstream os = internal::open_output(out_path);
        write_scatter_svg(os, embedding.coords, labels);
        out << "plotted " << embedding.coords.rows() << " points\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

/** Emit a labeled Gaussian-cluster surrogate dataset. */
inline int cmd_synth(size_t n, size_t dims, const std::vector<size_t>& clusters, double separation, uint64_t seed,
                     const std::string& out_path, std::ostream& out, std::ostream& err) {
    try {
        size_t total = 0;
        for (size_t c : clusters) {
            total += c;
        }
        if (total != n) {
            throw ConfigError("cluster sizes sum to " + std::to_string(total) + " but --n is " + std::to_string(n));
        }
        const Dataset data = synth_clusters(clusters, dims, separation, seed);
        std::ofstream os = internal::open_output(out_path);
        write_dataset(os, data);
        out << "wrote " << data.n() << " points in " << dims << " dimensions (label column " << dims << ")\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

} // namespace cli
} // namespace xim

#endif
