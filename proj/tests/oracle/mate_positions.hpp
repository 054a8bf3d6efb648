#pragma once

// Seeded generator of sparse positions with a forced mate in exactly n moves.

#include <random>
#include <vector>

#include "llchess/chess/board.hpp"
#include "oracle/minimax.hpp"

namespace oracle {

inline std::vector<llchess::chess::Board> mate_positions(std::uint64_t seed, std::size_t count, int n) {
    using namespace llchess::chess;
    std::mt19937_64 rng(seed);
    const std::vector<std::vector<PieceKind>> armies = {
        {PieceKind::Queen},
        {PieceKind::Rook, PieceKind::Rook},
        {PieceKind::Queen, PieceKind::Rook},
        {PieceKind::Queen, PieceKind::Bishop},
        {PieceKind::Rook, PieceKind::Bishop, PieceKind::Knight},
        {PieceKind::Queen, PieceKind::Knight},
    };
    std::vector<Board> out;
    while (out.size() < count) {
        BoardSetup s;
        const Color attacker = (rng() & 1) ? Color::White : Color::Black;
        s.side_to_move = attacker;
        auto place = [&](Piece p, bool pawn) {
            for (;;) {
                const Square sq = static_cast<Square>(rng() % 64);
                if (s.squares[static_cast<std::size_t>(sq)]) continue;
                if (pawn && (rank_of(sq) == 1 || rank_of(sq) == 8)) continue;
                s.squares[static_cast<std::size_t>(sq)] = p;
                return;
            }
        };
        place({attacker, PieceKind::King}, false);
        place({~attacker, PieceKind::King}, false);
        for (PieceKind k : armies[rng() % armies.size()]) place({attacker, k}, false);
        if (rng() % 3 == 0) place({~attacker, PieceKind::Pawn}, true);
        Board b = Board::startpos();
        try {
            b = Board::from_setup(s);
        } catch (const PositionError&) {
            continue;
        }
        if (in_check(b, attacker) || legal_moves(b).empty()) continue;
        if (n > 1 && forces_mate(b, n - 1)) continue;
        if (!forces_mate(b, n)) continue;
        out.push_back(b);
    }
    return out;
}

}  // namespace oracle
