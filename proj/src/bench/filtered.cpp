#include "llchess/bench/filtered.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace llchess::bench {

FilteredAccuracy filtered_accuracy(std::span<const models::PositionClass> predicted,
                                   std::span<const models::Centipawns> cp) {
    if (predicted.size() != cp.size()) throw std::invalid_argument("prediction and label counts differ");
    std::size_t hit[3] = {0, 0, 0}, n[3] = {0, 0, 0};
    for (std::size_t i = 0; i < cp.size(); ++i) {
        const bool ok = predicted[i] == models::label(cp[i]);
        const int a = std::abs(cp[i]);
        const bool keep[3] = {true, a < 115 || a > 185, a > 250};
        for (int v = 0; v < 3; ++v)
            if (keep[v]) {
                ++n[v];
                hit[v] += ok;
            }
    }
    for (int v = 0; v < 3; ++v)
        if (n[v] == 0) throw std::invalid_argument("filtered test set is empty");
    FilteredAccuracy r;
    r.unfiltered = static_cast<double>(hit[0]) / static_cast<double>(n[0]);
    r.boundary_removed = static_cast<double>(hit[1]) / static_cast<double>(n[1]);
    r.drawish_removed = static_cast<double>(hit[2]) / static_cast<double>(n[2]);
    r.n_unfiltered = n[0];
    r.n_boundary_removed = n[1];
    r.n_drawish_removed = n[2];
    return r;
}

FilteredAccuracy run_filtered_accuracy(const models::Network& classifier, const models::EncodedCorpus& test) {
    std::vector<models::PositionClass> predicted;
    std::vector<models::Centipawns> cp;
    predicted.reserve(test.size());
    cp.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        encoding::FeatureVector f;
        const auto src = test.features(i);
        std::copy(src.begin(), src.end(), f.begin());
        const auto p = models::classify(classifier, f);
        predicted.push_back(static_cast<models::PositionClass>(std::max_element(p.begin(), p.end()) - p.begin()));
        cp.push_back(test.cp(i));
    }
    return filtered_accuracy(predicted, cp);
}

}  // namespace llchess::bench
