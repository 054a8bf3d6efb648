#pragma once

#include <span>

#include "llchess/models/zoo.hpp"

namespace llchess::bench {

struct FilteredAccuracy {
    double unfiltered = 0.0;
    double boundary_removed = 0.0;  // |cp| in [115, 185] removed
    double drawish_removed = 0.0;   // |cp| <= 250 removed
    std::size_t n_unfiltered = 0;
    std::size_t n_boundary_removed = 0;
    std::size_t n_drawish_removed = 0;
};

// Accuracy of predicted classes against label(cp) on the three filtered views.
// Throws std::invalid_argument when a view is empty or the spans differ in length.
FilteredAccuracy filtered_accuracy(std::span<const models::PositionClass> predicted,
                                   std::span<const models::Centipawns> cp);

FilteredAccuracy run_filtered_accuracy(const models::Network& classifier, const models::EncodedCorpus& test);

}  // namespace llchess::bench
