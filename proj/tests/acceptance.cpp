// Acceptance suite: one check per release criterion, each printed as a
// single pass/fail line. Returns nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "xim/xim.hpp"

using namespace xim;

namespace {

int g_failures = 0;

class Criterion {
public:
    Criterion(int number, std::string name) : number_(number), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

    void check(bool ok, const std::string& detail) {
        ok_ = ok_ && ok;
        if (!ok && detail_.empty()) {
            detail_ = detail;
        }
    }

    ~Criterion() {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::printf("[%s] criterion %2d: %s (%.2f s)%s%s\n", ok_ ? "PASS" : "FAIL", number_, name_.c_str(), secs,
                    detail_.empty() ? "" : " -- ", detail_.c_str());
        std::fflush(stdout);
        if (!ok_) {
            ++g_failures;
        }
    }

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    int number_;
    std::string name_;
    std::chrono::steady_clock::time_point start_;
    bool ok_ = true;
    std::string detail_;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

Dataset random_dataset(SplitMix64& rng, size_t n, size_t d) {
    Dataset data;
    data.points = Matrix(n, d);
    for (size_t i = 0; i < n; ++i) {
        for (size_t c = 0; c < d; ++c) {
            data.points(i, c) = rng.next_normal();
        }
    }
    return data;
}

// ---------------------------------------------------------------- 1
void criterion_gradient_consistency() {
    Criterion cr(1, "analytic GKL update matches finite differences of the frozen cost");
    SplitMix64 rng(515151);
    double worst = 0;
    for (int inst = 0; inst < 20; ++inst) {
        const size_t n = 4 + rng.next_index(17);
        const size_t d = 1 + rng.next_index(5);
        const size_t mr = 1 + rng.next_index(3), mc = 1 + rng.next_index(3);
        const size_t m = mr * mc;
        Matrix nodes(m, 2);
        for (size_t j = 0; j < m; ++j) {
            nodes(j, 0) = static_cast<double>(j % mc);
            nodes(j, 1) = static_cast<double>(j / mc);
        }
        const Lattice lat = lattice_from_nodes(std::move(nodes));
        const Dataset data = random_dataset(rng, n, d);
        PrototypeSet protos;
        protos.w = Matrix(m, d);
        for (size_t j = 0; j < m; ++j) {
            for (size_t c = 0; c < d; ++c) {
                protos.w(j, c) = rng.next_normal();
            }
        }
        const KernelSpec h = KernelSpec::gaussian(0.5 + rng.next_double());
        const KernelSpec g = KernelSpec::gaussian(0.7 + rng.next_double());

        std::vector<size_t> winners(n);
        for (size_t i = 0; i < n; ++i) {
            winners[i] = best_match_gkl(data.points.row(i), d, protos, lat, h, g).winner;
        }
        auto frozen = [&](const Matrix& w) {
            double total = 0;
            for (size_t i = 0; i < n; ++i) {
                for (size_t j = 0; j < m; ++j) {
                    total += gkl_term(kernel_eval(h, lat.dist(winners[i], j)),
                                      kernel_eval(g, squared_euclidean(data.points.row(i), w.row(j), d)));
                }
            }
            return total;
        };

        Matrix analytic(m, d);
        for (size_t i = 0; i < n; ++i) {
            const PrototypeSet moved = xim_step_general(data.points.row(i), d, protos, lat, winners[i], h, g, DistanceSpec{}, gkl_gradient(), 1.0);
            for (size_t j = 0; j < m; ++j) {
                for (size_t c = 0; c < d; ++c) {
                    analytic(j, c) += protos.w(j, c) - moved.w(j, c);
                }
            }
        }

        const double delta = 1e-6;
        Matrix wcopy = protos.w;
        double num = 0, den = 0;
        for (size_t j = 0; j < m; ++j) {
            for (size_t c = 0; c < d; ++c) {
                const double orig = wcopy(j, c);
                wcopy(j, c) = orig + delta;
                const double up = frozen(wcopy);
                wcopy(j, c) = orig - delta;
                const double down = frozen(wcopy);
                wcopy(j, c) = orig;
                const double fd = (up - down) / (2 * delta);
                const double diff = analytic(j, c) - fd;
                num += diff * diff;
                den += std::max(analytic(j, c) * analytic(j, c), fd * fd);
            }
        }
        worst = std::max(worst, std::sqrt(num) / std::max(std::sqrt(den), 1e-12));
    }
    cr.check(worst < 1e-5, "worst relative error " + fmt(worst));
    cr.check(cr.elapsed() < 10.0, "runtime budget 10 s exceeded");
}

// ---------------------------------------------------------------- 2
void criterion_kernel_identity() {
    Criterion cr(2, "t-distribution kernel at sigma=1 equals the Cauchy-Lorentz kernel");
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const double dist = 0.1 * i;
        const double t = kernel_eval(KernelSpec::student_t(1.0), dist);
        const double c = kernel_eval(KernelSpec::cauchy_lorentz(1.0), dist);
        worst = std::max(worst, std::fabs(t - c));
    }
    cr.check(worst <= 1e-15, "worst deviation " + fmt(worst));
    cr.check(cr.elapsed() < 1.0, "runtime budget 1 s exceeded");
}

// ---------------------------------------------------------------- 3
void criterion_eta_weighting() {
    Criterion cr(3, "eta = 0.5 update direction is bitwise half the unweighted direction");
    SplitMix64 rng(727272);
    bool all_bitwise = true;
    for (int inst = 0; inst < 100; ++inst) {
        const size_t m = 2 + rng.next_index(6);
        const size_t d = 1 + rng.next_index(4);
        Matrix nodes(m, 2);
        for (size_t j = 0; j < m; ++j) {
            nodes(j, 0) = rng.next_normal();
            nodes(j, 1) = rng.next_normal();
        }
        const Lattice lat = lattice_from_nodes(std::move(nodes));
        PrototypeSet p;
        p.w = Matrix(m, d);  // zero prototypes: the result equals the update direction
        std::vector<double> x(d);
        for (double& v : x) {
            v = rng.next_normal();
        }
        const KernelSpec h{rng.next_index(2) == 0 ? KernelFamily::GAUSSIAN : KernelFamily::CAUCHY_LORENTZ, 0.4 + rng.next_double()};
        const KernelSpec g = KernelSpec::gaussian(0.4 + rng.next_double());
        const double epsilon = 0.01 + rng.next_double();
        const size_t winner = rng.next_index(m);

        const PrototypeSet half = xim_step(x.data(), d, p, lat, winner, h, g, epsilon, 0.5, true);
        const PrototypeSet full = xim_step(x.data(), d, p, lat, winner, h, g, epsilon, 0.5, false);
        for (size_t j = 0; j < m; ++j) {
            for (size_t c = 0; c < d; ++c) {
                if (half.w(j, c) != 0.5 * full.w(j, c)) {
                    all_bitwise = false;
                }
            }
        }
    }
    cr.check(all_bitwise, "found a non-bitwise pair");
}

// ---------------------------------------------------------------- 4
void criterion_batch_stationarity() {
    Criterion cr(4, "batch fixed point reaches stationarity; Voronoi step matches the plain step");
    const Dataset data = synth_clusters({20, 20}, 3, 8.0, 606060);
    const Lattice lat = build_lattice(2, 2);
    TrainConfig cfg;
    cfg.method = Method::BATCH_XIM;
    cfg.seed = 31;
    cfg.sigma = {0.5, 0.5};
    cfg.gamma = {2.0, 2.0};
    cfg.eta = 0.3;
    const BatchResult result = batch_xim_train(data, lat, cfg, 1e-10, 500, 0.5);
    cr.check(result.report.converged, "batch iteration did not converge");
    cr.check(result.report.stationarity_residual < 1e-6, "stationarity residual " + fmt(result.report.stationarity_residual));

    SplitMix64 rng(777);
    double worst = 0;
    for (int inst = 0; inst < 5; ++inst) {
        Matrix w(4, 3);
        for (size_t j = 0; j < 4; ++j) {
            for (size_t c = 0; c < 3; ++c) {
                w(j, c) = 2.0 * rng.next_normal();
            }
        }
        BatchState plain;
        plain.prototypes.w = w;
        BatchState fast;
        fast.prototypes.w = w;
        const KernelSpec h = KernelSpec::gaussian(0.8);
        const KernelSpec g = KernelSpec::gaussian(1.7);
        plain = batch_xim_iterate(data, std::move(plain), lat, h, g, DistanceSpec{}, 0.3, 0.5);
        fast = voronoi_batch_step(data, std::move(fast), lat, h, g, DistanceSpec{}, 0.3, 0.5);
        for (size_t j = 0; j < 4; ++j) {
            for (size_t c = 0; c < 3; ++c) {
                worst = std::max(worst, std::fabs(plain.prototypes.w(j, c) - fast.prototypes.w(j, c)));
            }
        }
    }
    cr.check(worst <= 1e-10, "Voronoi/plain deviation " + fmt(worst));
    cr.check(cr.elapsed() < 5.0, "runtime budget 5 s exceeded");
}

// ---------------------------------------------------------------- 5
void criterion_median_correctness() {
    Criterion cr(5, "median XIM picks the brute-force f-weighted argmin at every node");
    SplitMix64 rng(909090);
    bool all_match = true;
    for (int inst = 0; inst < 8; ++inst) {
        const size_t n = 6 + rng.next_index(25);  // <= 30
        Matrix pts(n, 3);
        for (size_t i = 0; i < n; ++i) {
            for (size_t c = 0; c < 3; ++c) {
                pts(i, c) = 2.0 * rng.next_normal();
            }
        }
        Matrix d2(n, n);
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = i + 1; j < n; ++j) {
                const double v = squared_euclidean(pts.row(i), pts.row(j), 3);
                d2(i, j) = v;
                d2(j, i) = v;
            }
        }
        const DissimilarityMatrix diss = make_dissimilarity(std::move(d2));
        const Lattice lat = build_lattice(2, 2);
        const KernelSpec h = KernelSpec::gaussian(1.0);
        const KernelSpec g = KernelSpec::gaussian(2.0);
        const BestMatchRule rule = (inst % 2 == 0) ? BestMatchRule::GKL : BestMatchRule::MIN_DISTANCE;
        const MedianState state = median_xim_train(diss, lat, h, g, rule, MedianCandidates::ALL, 60);

        for (size_t j = 0; j < lat.m(); ++j) {
            double best_cost = std::numeric_limits<double>::infinity();
            size_t best_item = 0;
            for (size_t cand = 0; cand < n; ++cand) {
                double acc = 0;
                for (size_t i = 0; i < n; ++i) {
                    acc += (kernel_eval(h, lat.dist(state.winners[i], j)) - kernel_eval(g, diss.values(i, state.prev_median[j]))) * diss.values(i, cand);
                }
                if (acc < best_cost) {
                    best_cost = acc;
                    best_item = cand;
                }
            }
            if (state.median[j] != best_item) {
                all_match = false;
            }
        }
    }
    cr.check(all_match, "a median disagreed with the exhaustive argmin");
    cr.check(cr.elapsed() < 5.0, "runtime budget 5 s exceeded");
}

// ------------------------------------------------- 6 (oracle helpers)
std::vector<size_t> knn_scan(const Matrix& pts, size_t i, size_t k) {
    std::vector<char> used(pts.rows(), 0);
    used[i] = 1;
    std::vector<size_t> out;
    for (size_t round = 0; round < k; ++round) {
        size_t best = pts.rows();
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < pts.rows(); ++j) {
            if (!used[j]) {
                const double d = squared_euclidean(pts.row(i), pts.row(j), pts.cols());
                if (d < best_d || (d == best_d && j < best)) {
                    best_d = d;
                    best = j;
                }
            }
        }
        used[best] = 1;
        out.push_back(best);
    }
    return out;
}

double trustworthiness_ref(const Matrix& high, const Matrix& low, size_t k) {
    const size_t n = high.rows();
    double penalty = 0;
    for (size_t i = 0; i < n; ++i) {
        const std::vector<size_t> low_nn = knn_scan(low, i, k);
        const std::vector<size_t> high_nn = knn_scan(high, i, k);
        for (size_t j : low_nn) {
            bool found = false;
            for (size_t l : high_nn) {
                found = found || (l == j);
            }
            if (!found) {
                const double dj = squared_euclidean(high.row(i), high.row(j), high.cols());
                size_t rank = 1;
                for (size_t l = 0; l < n; ++l) {
                    if (l != i && l != j) {
                        const double dl = squared_euclidean(high.row(i), high.row(l), high.cols());
                        if (dl < dj || (dl == dj && l < j)) {
                            ++rank;
                        }
                    }
                }
                penalty += static_cast<double>(rank) - static_cast<double>(k);
            }
        }
    }
    const double nn = static_cast<double>(n), kk = static_cast<double>(k);
    return 1.0 - 2.0 / (nn * kk * (2.0 * nn - 3.0 * kk - 1.0)) * penalty;
}

void criterion_metric_oracles() {
    Criterion cr(6, "rank metrics equal the naive reference; perfect embeddings hit their fixed points");
    bool exact = true;
    bool in_range = true;
    for (uint64_t seed = 1; seed <= 50; ++seed) {
        SplitMix64 rng(seed * 131);
        const size_t n = 10 + rng.next_index(51);  // <= 60
        const Dataset data = random_dataset(rng, n, 5);
        Matrix coords(n, 2);
        for (size_t i = 0; i < n; ++i) {
            coords(i, 0) = rng.next_normal();
            coords(i, 1) = rng.next_normal();
        }
        const size_t k_hi = (n - 1) / 2;
        for (size_t k = 1; k <= k_hi; k += std::max<size_t>(1, k_hi / 4)) {
            const double t = trustworthiness(data.points, coords, k);
            const double c = continuity(data.points, coords, k);
            if (t != trustworthiness_ref(data.points, coords, k)) {
                exact = false;
            }
            if (c != trustworthiness_ref(coords, data.points, k)) {
                exact = false;
            }
            in_range = in_range && t >= 0.0 && t <= 1.0 && c >= 0.0 && c <= 1.0;
        }
    }
    cr.check(exact, "implementation deviated from the naive reference");
    cr.check(in_range, "a metric left its [0,1] range");

    // identity-like embedding: data already lives in a 2-D subspace
    SplitMix64 rng(4242);
    Dataset data;
    data.points = Matrix(30, 6);
    for (size_t i = 0; i < 30; ++i) {
        data.points(i, 0) = rng.next_normal();
        data.points(i, 1) = rng.next_normal();
    }
    Matrix coords(30, 2);
    for (size_t i = 0; i < 30; ++i) {
        coords(i, 0) = data.points(i, 0);
        coords(i, 1) = data.points(i, 1);
    }
    const std::vector<double> high = pairwise_euclidean(data.points);
    const std::vector<double> low = pairwise_euclidean(coords);
    cr.check(sammon_error(high, low) == 0.0, "Sammon error of a perfect embedding is nonzero");
    cr.check(spearman_rho(high, low) == 1.0, "Spearman rho of a perfect embedding is not 1");
    bool tc_perfect = true;
    for (size_t k = 1; k <= 14; ++k) {
        tc_perfect = tc_perfect && trustworthiness(data.points, coords, k) == 1.0 && continuity(data.points, coords, k) == 1.0;
    }
    cr.check(tc_perfect, "T or C of a perfect embedding is not 1");
    cr.check(cr.elapsed() < 30.0, "runtime budget 30 s exceeded");
}

// ---------------------------------------------------------------- 7
void criterion_crowding_mitigation() {
    Criterion cr(7, "heavy-tailed ordering kernel beats the Gaussian one on the surrogate");
    const Dataset data = synth_clusters({22, 125}, 79, 8.0, 20250101);

    // the separation must be large enough for a PCA projection to separate
    // the two clusters
    const PcaEmbedding pca = pca_embed(data, 2);
    const double pca_sil = silhouette_score(pca.embedding.coords, data.labels);
    cr.check(pca_sil > 0.5, "PCA does not separate the surrogate clusters (silhouette " + fmt(pca_sil) + ")");

    auto run = [&](Method method, uint64_t seed, double& trust, double& sil) {
        const Lattice lat = build_lattice(10, 10);
        TrainConfig cfg;
        cfg.method = method;
        cfg.t_max = 30000;
        cfg.seed = seed;
        const TrainResult r = train(data, lat, cfg);
        const Matrix coords = embed_dataset(data, reference_pairs(r.prototypes, lat)).coords;
        double acc = 0;
        for (size_t k = 1; k <= 20; ++k) {
            acc += trustworthiness(data.points, coords, k);
        }
        trust = acc / 20.0;
        sil = silhouette_score(coords, data.labels);
    };

    double t_cauchy = 0, t_gauss = 0, s_cauchy = 0, s_gauss = 0;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        double t, s;
        run(Method::C_XIM, seed, t, s);
        t_cauchy += t;
        s_cauchy += s;
        run(Method::XIM, seed, t, s);
        t_gauss += t;
        s_gauss += s;
    }
    t_cauchy /= 10;
    t_gauss /= 10;
    s_cauchy /= 10;
    s_gauss /= 10;
    cr.check(t_cauchy >= t_gauss, "mean trustworthiness c-XIM " + fmt(t_cauchy) + " < XIM " + fmt(t_gauss));
    cr.check(s_cauchy > s_gauss, "mean silhouette c-XIM " + fmt(s_cauchy) + " <= XIM " + fmt(s_gauss));
    cr.check(cr.elapsed() < 300.0, "runtime budget 5 min exceeded");
}

// ---------------------------------------------------------------- 8
void criterion_protocol_fidelity() {
    Criterion cr(8, "subsampled evaluation protocol emits the 4-metric mean(std) table");
    const Dataset data = synth_clusters({22, 125}, 79, 8.0, 20250101);

    ProtocolConfig proto;
    proto.runs = 10;
    proto.fraction = 0.95;
    proto.k_min = 1;
    proto.k_max = 50;
    proto.seed = 99;

    std::vector<std::pair<std::string, QualityReport>> rows;
    for (Method method : {Method::SOM, Method::C_XIM, Method::PCA}) {
        MethodSetup setup;
        setup.method = method;
        setup.rows = 10;
        setup.cols = 10;
        setup.train.t_max = 5000;
        rows.emplace_back(method_name(method), evaluate_protocol(data, setup, proto));
    }
    bool shape_ok = rows.size() == 3;
    for (const auto& [name, report] : rows) {
        shape_ok = shape_ok && report.runs == 10 && report.raw.rows() == 10 && report.raw.cols() == 4;
        // 140 of 147 points, k max clipped to floor(139/2) = 69 >= 50: no clip
        shape_ok = shape_ok && report.k_max_used == 50 && !report.k_clipped;
    }
    cr.check(shape_ok, "report shape wrong");

    std::ostringstream table;
    write_report_table(table, rows);
    const std::string text = table.str();
    cr.check(text.find("som\t") != std::string::npos && text.find("c-xim\t") != std::string::npos && text.find("pca\t") != std::string::npos,
             "table is missing a method row");
    cr.check(text.find("trustworthiness") != std::string::npos && text.find("continuity") != std::string::npos,
             "table is missing a metric column");

    // single-run protocol: every std cell is exactly zero
    ProtocolConfig single = proto;
    single.runs = 1;
    MethodSetup setup;
    setup.method = Method::PCA;
    const QualityReport one = evaluate_protocol(data, setup, single);
    bool zero_std = true;
    for (size_t metric = 0; metric < 4; ++metric) {
        zero_std = zero_std && one.stddev[metric] == 0.0;
    }
    cr.check(zero_std, "runs=1 produced a nonzero std");
    cr.check(cr.elapsed() < 600.0, "runtime budget 10 min exceeded");
}

// ---------------------------------------------------------------- 9
void criterion_determinism() {
    Criterion cr(9, "fixed-seed train/embed/evaluate/plot pipeline is byte-identical across runs");
    const std::string dir = "acceptance_tmp";
    std::filesystem::create_directories(dir);
    const std::string data_path = dir + "/surrogate.csv";
    std::ostringstream devnull;
    cr.check(cli::cmd_synth(147, 79, {22, 125}, 8.0, 20250101, data_path, devnull, std::cerr) == cli::kExitOk, "synth failed");

    auto pipeline = [&](const std::string& tag) {
        const std::string model = dir + "/" + tag + ".xim";
        const std::string emb = dir + "/" + tag + ".emb";
        const std::string svg = dir + "/" + tag + ".svg";
        const std::string rep = dir + "/" + tag + ".rep";
        std::ostringstream sink;
        bool ok = true;
        ok = ok && cli::cmd_train(data_path, "", model, dir + "/" + tag + ".log",
                                  {"label_column=79", "rows=6", "cols=6", "t_max=2000", "seed=5", "method=c-xim", "log_stride=500"}, sink, std::cerr) == cli::kExitOk;
        ok = ok && cli::cmd_embed(model, data_path, emb, {"label_column=79"}, sink, std::cerr) == cli::kExitOk;
        ok = ok && cli::cmd_plot(emb, "", svg, sink, std::cerr) == cli::kExitOk;
        ok = ok && cli::cmd_evaluate(data_path, "", rep, {"label_column=79", "methods=pca,c-xim", "runs=2", "rows=4", "cols=4", "t_max=500", "k_max=10", "seed=5"}, sink, std::cerr) == cli::kExitOk;
        std::string blob;
        for (const std::string& path : {model, emb, svg, rep + ".txt", rep + ".kv", dir + "/" + tag + ".log"}) {
            std::ifstream in(path, std::ios::binary);
            std::stringstream ss;
            ss << in.rdbuf();
            blob += ss.str();
            blob += '\x01';
        }
        return std::pair<bool, std::string>(ok, blob);
    };

    const auto [ok1, blob1] = pipeline("run_a");
    const auto [ok2, blob2] = pipeline("run_b");
    cr.check(ok1 && ok2, "a pipeline stage failed");
    cr.check(blob1 == blob2, "pipeline artifacts differ between executions");
    std::filesystem::remove_all(dir);
}

// ---------------------------------------------------------------- 10
void criterion_complexity() {
    Criterion cr(10, "per-iteration online cost stays near-linear in the node count");
    SplitMix64 rng(606);
    const Dataset data = random_dataset(rng, 200, 16);

    double sink = 0;
    auto time_once = [&](size_t rows, size_t cols) {
        const Lattice lat = build_lattice(rows, cols);
        TrainConfig cfg;
        cfg.t_max = 2000;
        cfg.seed = 7;
        cfg.method = Method::C_XIM;
        const auto start = std::chrono::steady_clock::now();
        const TrainResult r = train(data, lat, cfg);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        sink += r.prototypes.w(0, 0);  // keep the training observable
        return secs;
    };
    auto median_time = [&](size_t rows, size_t cols) {
        std::vector<double> times;
        for (int rep = 0; rep < 5; ++rep) {
            times.push_back(time_once(rows, cols));
        }
        std::sort(times.begin(), times.end());
        return times[2];
    };

    const double t100 = median_time(10, 10);
    const double t200 = median_time(10, 20);
    const double t400 = median_time(20, 20);
    const double ratio1 = t200 / t100;
    const double ratio2 = t400 / t200;
    cr.check(std::isfinite(sink), "training produced non-finite prototypes");
    cr.check(ratio1 <= 2.6, "doubling M from 100 to 200 scaled time by " + fmt(ratio1));
    cr.check(ratio2 <= 2.6, "doubling M from 200 to 400 scaled time by " + fmt(ratio2));
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_gradient_consistency();
    criterion_kernel_identity();
    criterion_eta_weighting();
    criterion_batch_stationarity();
    criterion_median_correctness();
    criterion_metric_oracles();
    criterion_crowding_mitigation();
    criterion_protocol_fidelity();
    criterion_determinism();
    criterion_complexity();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
