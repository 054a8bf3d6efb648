#include "llchess/chess/bitboard.hpp"

#include <array>

namespace llchess::chess {
namespace {

// Direction order: N, S, E, W, NE, NW, SE, SW (north = towards rank 8 = lower index).
constexpr std::array<int, 8> kFileStep = {0, 0, 1, -1, 1, -1, 1, -1};
constexpr std::array<int, 8> kRankStep = {1, -1, 0, 0, 1, 1, -1, -1};
// Rays whose squares have increasing index use lsb to find the nearest blocker.
constexpr std::array<bool, 8> kIncreasing = {false, true, true, false, false, false, true, true};

struct Tables {
    std::array<Bitboard, 64> knight{};
    std::array<Bitboard, 64> king{};
    std::array<std::array<Bitboard, 64>, 2> pawn{};
    std::array<std::array<Bitboard, 64>, 8> ray{};

    Tables() {
        auto step = [](Square s, int df, int dr) -> Square {
            const int f = file_of(s) + df;
            const int r = rank_of(s) + dr;
            if (f < 0 || f > 7 || r < 1 || r > 8) return kNoSquare;
            return make_square(f, r);
        };
        auto add = [&](Bitboard& b, Square s, int df, int dr) {
            const Square t = step(s, df, dr);
            if (t != kNoSquare) b |= bit(t);
        };
        for (Square s = 0; s < 64; ++s) {
            for (auto [df, dr] : {std::pair{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}})
                add(knight[s], s, df, dr);
            for (int df = -1; df <= 1; ++df)
                for (int dr = -1; dr <= 1; ++dr)
                    if (df != 0 || dr != 0) add(king[s], s, df, dr);
            add(pawn[0][s], s, -1, 1);
            add(pawn[0][s], s, 1, 1);
            add(pawn[1][s], s, -1, -1);
            add(pawn[1][s], s, 1, -1);
            for (int d = 0; d < 8; ++d) {
                Square t = step(s, kFileStep[d], kRankStep[d]);
                while (t != kNoSquare) {
                    ray[d][s] |= bit(t);
                    t = step(t, kFileStep[d], kRankStep[d]);
                }
            }
        }
    }
};

const Tables& tables() {
    static const Tables t;
    return t;
}

Bitboard slide(Square s, Bitboard occupied, int d) {
    const auto& rays = tables().ray[d];
    Bitboard attacks = rays[s];
    const Bitboard blockers = attacks & occupied;
    if (blockers) {
        const Square b = kIncreasing[d] ? lsb(blockers) : msb(blockers);
        attacks ^= rays[b];
    }
    return attacks;
}

}  // namespace

Bitboard knight_attacks(Square s) { return tables().knight[s]; }
Bitboard king_attacks(Square s) { return tables().king[s]; }
Bitboard pawn_attacks(Color c, Square s) { return tables().pawn[index(c)][s]; }

Bitboard bishop_attacks(Square s, Bitboard occupied) {
    return slide(s, occupied, 4) | slide(s, occupied, 5) | slide(s, occupied, 6) | slide(s, occupied, 7);
}

Bitboard rook_attacks(Square s, Bitboard occupied) {
    return slide(s, occupied, 0) | slide(s, occupied, 1) | slide(s, occupied, 2) | slide(s, occupied, 3);
}

}  // namespace llchess::chess
