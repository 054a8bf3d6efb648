#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "llchess/chess/fen.hpp"
#include "llchess/chess/movegen.hpp"

namespace testing_support {

inline std::filesystem::path data_dir() { return LLCHESS_TEST_DATA; }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline std::vector<std::string> lines(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);)
        if (!l.empty() && l[0] != '#') out.push_back(l);
    return out;
}

// Position reached by a seeded random playout of `plies` moves from the start.
// Playouts that hit a terminal position stop there; callers filter as needed.
inline llchess::chess::Board random_position(std::mt19937_64& rng, int plies) {
    using namespace llchess::chess;
    Board b = Board::startpos();
    for (int i = 0; i < plies; ++i) {
        const auto moves = legal_moves(b);
        if (moves.empty()) break;
        b = b.after(moves[static_cast<std::size_t>(rng() % moves.size())]);
    }
    return b;
}

// Nonterminal random positions with a fresh halfmove clock budget.
inline std::vector<llchess::chess::Board> random_positions(std::uint64_t seed, std::size_t count, int min_plies,
                                                           int max_plies) {
    using namespace llchess::chess;
    std::mt19937_64 rng(seed);
    std::vector<Board> out;
    while (out.size() < count) {
        const int plies = min_plies + static_cast<int>(rng() % static_cast<std::uint64_t>(max_plies - min_plies + 1));
        Board b = random_position(rng, plies);
        if (legal_moves(b).empty() || b.halfmove_clock() >= 90) continue;
        out.push_back(b);
    }
    return out;
}

}  // namespace testing_support
