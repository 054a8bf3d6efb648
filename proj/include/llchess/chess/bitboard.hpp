#pragma once

#include <bit>

#include "llchess/chess/types.hpp"

namespace llchess::chess {

inline int popcount(Bitboard b) { return std::popcount(b); }
inline Square lsb(Bitboard b) { return std::countr_zero(b); }
inline Square msb(Bitboard b) { return 63 - std::countl_zero(b); }
inline Square pop_lsb(Bitboard& b) {
    const Square s = lsb(b);
    b &= b - 1;
    return s;
}

inline constexpr Bitboard kRank1 = 0xFF00000000000000ULL;
inline constexpr Bitboard kRank2 = 0x00FF000000000000ULL;
inline constexpr Bitboard kRank7 = 0x000000000000FF00ULL;
inline constexpr Bitboard kRank8 = 0x00000000000000FFULL;

Bitboard knight_attacks(Square s);
Bitboard king_attacks(Square s);
// Squares a pawn of color c standing on s attacks.
Bitboard pawn_attacks(Color c, Square s);
Bitboard bishop_attacks(Square s, Bitboard occupied);
Bitboard rook_attacks(Square s, Bitboard occupied);
inline Bitboard queen_attacks(Square s, Bitboard occupied) {
    return bishop_attacks(s, occupied) | rook_attacks(s, occupied);
}

}  // namespace llchess::chess
