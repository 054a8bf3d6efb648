#pragma once

#include <cstdint>
#include <ostream>

namespace llchess::refengine {

struct SelfplayConfig {
    int games = 100;
    std::uint64_t seed = 1;
    // Probability of playing a uniformly random legal move instead of the searched one.
    double random_fraction = 0.3;
    int search_depth = 2;
    int max_plies = 200;  // adjudicated as a draw
};

struct SelfplayStats {
    int games = 0;
    int white_wins = 0;
    int black_wins = 0;
    int draws = 0;
    long long plies = 0;
};

// Plays games of the classical engine against itself and writes them as PGN.
// Deterministic for a given config.
SelfplayStats selfplay(std::ostream& out, const SelfplayConfig& config);

}  // namespace llchess::refengine
