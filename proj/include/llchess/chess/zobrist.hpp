#pragma once

#include <array>
#include <cstdint>

#include "llchess/chess/types.hpp"

namespace llchess::chess::zobrist {

struct Keys {
    std::array<std::array<std::uint64_t, 64>, 12> piece{};
    std::uint64_t black_to_move = 0;
    std::array<std::uint64_t, 16> castling{};
    std::array<std::uint64_t, 8> en_passant_file{};
};

// Fixed-seed keys; identical across runs and platforms.
const Keys& keys();

inline std::uint64_t piece_key(Piece p, Square s) {
    return keys().piece[index(p.color) * kNumKinds + index(p.kind)][s];
}

}  // namespace llchess::chess::zobrist
