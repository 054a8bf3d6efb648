#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "llchess/chess/types.hpp"

namespace llchess::chess {

// Raised for positions that cannot be represented or violate chess invariants.
// field() names the offending FEN field (placement, side, castling, en-passant,
// halfmove, fullmove, fields).
class PositionError : public std::invalid_argument {
public:
    PositionError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class Validation {
    Strict,   // one king per side, side not to move not in check, consistent castling/en passant
    Lenient,  // only structural checks; admits kingless fragments used as fixtures
};

// Plain description of a position, used to construct a Board.
struct BoardSetup {
    std::array<std::optional<Piece>, 64> squares{};
    Color side_to_move = Color::White;
    CastlingRights castling{};
    std::optional<Square> en_passant;
    int halfmove_clock = 0;
    int fullmove_number = 1;
};

class Board {
public:
    static Board startpos();
    static Board from_setup(const BoardSetup& setup, Validation mode = Validation::Strict);

    BoardSetup setup() const;

    Bitboard pieces(Color c, PieceKind k) const { return pieces_[index(c)][index(k)]; }
    Bitboard pieces(Color c) const { return occupancy_[index(c)]; }
    Bitboard occupied() const { return occupancy_[0] | occupancy_[1]; }
    std::optional<Piece> piece_at(Square s) const;

    Color side_to_move() const { return side_; }
    CastlingRights castling() const { return CastlingRights::from_mask(castling_); }
    std::optional<Square> en_passant() const {
        return en_passant_ == kNoSquare ? std::nullopt : std::optional<Square>(en_passant_);
    }
    int halfmove_clock() const { return halfmove_; }
    int fullmove_number() const { return fullmove_; }
    std::uint64_t hash() const { return hash_; }

    // kNoSquare when the side has no king (lenient fixtures only).
    Square king_square(Color c) const;
    bool attacked_by(Square s, Color attacker) const;
    Bitboard attackers_to(Square s, Color attacker, Bitboard occupied) const;

    // Returns the position after a move. The move must come from this position's
    // pseudo-legal move set; legality is the caller's concern (see apply_move).
    Board after(const Move& m) const;
    // Same placement with the side to move flipped and en passant cleared.
    Board after_null() const;

    // Recomputes the Zobrist key from scratch.
    std::uint64_t compute_hash() const;

    friend bool operator==(const Board&, const Board&) = default;

private:
    Board() = default;
    void put(Square s, Piece p);
    void remove(Square s);

    std::array<std::array<Bitboard, kNumKinds>, 2> pieces_{};
    std::array<Bitboard, 2> occupancy_{};
    // -1 for empty, otherwise color * 6 + kind.
    std::array<std::int8_t, 64> mailbox_{};
    Color side_ = Color::White;
    int castling_ = 0;
    Square en_passant_ = kNoSquare;
    int halfmove_ = 0;
    int fullmove_ = 1;
    std::uint64_t hash_ = 0;
};

// True iff c's king is attacked. Kingless sides are never in check.
bool in_check(const Board& board, Color c);

}  // namespace llchess::chess
