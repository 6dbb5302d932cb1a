// Command-line front end for the xim toolkit: train, embed, evaluate, plot
// and synth subcommands. All heavy lifting lives in the headers; this file
// only parses flags.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xim/cli.hpp"

namespace {

constexpr const char* kExitCodeHelp =
    "Exit codes: 0 success, 1 internal error, 2 invalid configuration, "
    "3 unreadable or malformed data, 4 dimension mismatch, 5 non-2D plot input.";

std::vector<size_t> parse_cluster_sizes(const std::string& spec) {
    std::vector<size_t> sizes;
    std::string token;
    std::stringstream ss(spec);
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) {
            sizes.push_back(static_cast<size_t>(std::stoull(token)));
        }
    }
    return sizes;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"xim - topographic embedding toolkit (XIM / t-XIM / c-XIM, SOM, batch and median variants)"};
    app.footer(kExitCodeHelp);
    app.require_subcommand(1);

    // train
    std::string train_data, train_config, train_model, train_log;
    std::vector<std::string> train_set;
    CLI::App* train = app.add_subcommand("train", "Train a model and write it to disk");
    train->add_option("--data", train_data, "Input dataset (dissimilarity matrix for median-xim)")->required();
    train->add_option("--config", train_config, "Run configuration file (key=value lines)");
    train->add_option("--out", train_model, "Output model path")->required();
    train->add_option("--log", train_log, "Optional training log path (enable rows with log_stride)");
    train->add_option("--set", train_set, "Override a config key, e.g. --set eta=0.4 (flags beat the file)");

    // embed
    std::string embed_model, embed_data, embed_out;
    std::vector<std::string> embed_set;
    CLI::App* embed = app.add_subcommand("embed", "Map data (training or out-of-sample) through a trained model");
    embed->add_option("--model", embed_model, "Trained model path")->required();
    embed->add_option("--data", embed_data, "Dataset to embed")->required();
    embed->add_option("--out", embed_out, "Output embedding path")->required();
    embed->add_option("--set", embed_set, "Override a config key (power, header, label_column, ...)");

    // evaluate
    std::string eval_data, eval_config, eval_prefix;
    std::vector<std::string> eval_set;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Run the subsampled quality-evaluation protocol");
    evaluate->add_option("--data", eval_data, "Input dataset")->required();
    evaluate->add_option("--config", eval_config, "Run configuration file");
    evaluate->add_option("--out", eval_prefix, "Output report prefix (writes <prefix>.txt and <prefix>.kv)")->required();
    evaluate->add_option("--set", eval_set, "Override a config key (methods, runs, fraction, k_min, k_max, ...)");

    // plot
    std::string plot_embedding, plot_labels, plot_out;
    CLI::App* plot = app.add_subcommand("plot", "Render a 2-D embedding as an SVG scatter");
    plot->add_option("--embedding", plot_embedding, "Embedding file written by the embed command")->required();
    plot->add_option("--labels", plot_labels, "Optional label file, one integer per line");
    plot->add_option("--out", plot_out, "Output SVG path")->required();

    // synth
    size_t synth_n = 147, synth_dims = 79;
    std::string synth_clusters_spec = "22,125", synth_out;
    double synth_separation = 8.0;
    uint64_t synth_seed = 1;
    CLI::App* synth = app.add_subcommand("synth", "Emit a labeled Gaussian-cluster surrogate dataset");
    synth->add_option("--n", synth_n, "Total number of points");
    synth->add_option("--dims", synth_dims, "Feature dimensionality");
    synth->add_option("--clusters", synth_clusters_spec, "Comma-separated cluster sizes (must sum to --n)");
    synth->add_option("--separation", synth_separation, "Pairwise distance between cluster centers");
    synth->add_option("--seed", synth_seed, "Random seed");
    synth->add_option("--out", synth_out, "Output dataset path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // CLI11 returns 0 for --help; anything else is a usage problem.
        return code == 0 ? xim::cli::kExitOk : xim::cli::kExitConfig;
    }

    if (train->parsed()) {
        return xim::cli::cmd_train(train_data, train_config, train_model, train_log, train_set, std::cout, std::cerr);
    }
    if (embed->parsed()) {
        return xim::cli::cmd_embed(embed_model, embed_data, embed_out, embed_set, std::cout, std::cerr);
    }
    if (evaluate->parsed()) {
        return xim::cli::cmd_evaluate(eval_data, eval_config, eval_prefix, eval_set, std::cout, std::cerr);
    }
    if (plot->parsed()) {
        return xim::cli::cmd_plot(plot_embedding, plot_labels, plot_out, std::cout, std::cerr);
    }
    if (synth->parsed()) {
        return xim::cli::cmd_synth(synth_n, synth_dims, parse_cluster_sizes(synth_clusters_spec), synth_separation, synth_seed, synth_out, std::cout, std::cerr);
    }
    return xim::cli::kExitInternal;
}
