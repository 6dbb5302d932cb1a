// Minimal end-to-end usage: generate two Gaussian clusters, train a c-XIM
// map, embed the data through Shepard interpolation and print quality
// metrics next to a PCA baseline.

#include <cstdio>

#include "xim/analysis.hpp"
#include "xim/synth.hpp"

int main() {
    using namespace xim;

    const Dataset data = synth_clusters({40, 80}, 24, 7.0, 1234);
    const Lattice lattice = build_lattice(8, 8);

    TrainConfig config;
    config.method = Method::C_XIM;
    config.t_max = 20000;
    config.seed = 1;

    const TrainResult trained = train(data, lattice, config);
    const Matrix coords = embed_dataset(data, reference_pairs(trained.prototypes, lattice)).coords;
    const Matrix pca_coords = pca_embed(data, 2).embedding.coords;

    const std::vector<double> high = pairwise_euclidean(data.points);
    auto report = [&](const char* name, const Matrix& emb) {
        const std::vector<double> low = pairwise_euclidean(emb);
        double trust = 0;
        for (size_t k = 1; k <= 10; ++k) {
            trust += trustworthiness(data.points, emb, k);
        }
        std::printf("%-6s sammon=%.4f spearman=%.4f trustworthiness(1..10)=%.4f silhouette=%.4f\n", name,
                    sammon_error(high, low), spearman_rho(high, low), trust / 10.0,
                    silhouette_score(emb, data.labels));
    };
    report("c-xim", coords);
    report("pca", pca_coords);
    return 0;
}
