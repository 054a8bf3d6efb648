#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace llchess::chess {

using Bitboard = std::uint64_t;

// Squares are numbered in FEN reading order: a8 = 0, h8 = 7, ..., a1 = 56, h1 = 63.
using Square = int;

enum class Color : std::uint8_t { White = 0, Black = 1 };

// Order matters: feature planes and piece tables are indexed by it.
enum class PieceKind : std::uint8_t { Pawn = 0, Knight, Bishop, Rook, Queen, King };

inline constexpr int kNumKinds = 6;
inline constexpr int kNoSquare = -1;

constexpr Color operator~(Color c) { return c == Color::White ? Color::Black : Color::White; }
constexpr int index(Color c) { return static_cast<int>(c); }
constexpr int index(PieceKind k) { return static_cast<int>(k); }

struct Piece {
    Color color;
    PieceKind kind;
    friend constexpr bool operator==(Piece, Piece) = default;
};

constexpr int file_of(Square s) { return s & 7; }
// 1-based chess rank (1..8).
constexpr int rank_of(Square s) { return 8 - (s >> 3); }
constexpr Square make_square(int file, int rank) { return (8 - rank) * 8 + file; }
constexpr Bitboard bit(Square s) { return Bitboard{1} << s; }

inline std::string square_name(Square s) {
    return {static_cast<char>('a' + file_of(s)), static_cast<char>('0' + rank_of(s))};
}

inline std::optional<Square> parse_square(std::string_view text) {
    if (text.size() != 2 || text[0] < 'a' || text[0] > 'h' || text[1] < '1' || text[1] > '8')
        return std::nullopt;
    return make_square(text[0] - 'a', text[1] - '0');
}

// FEN letter for a piece: uppercase for white.
char piece_char(Piece p);
std::optional<Piece> piece_from_char(char c);

struct CastlingRights {
    bool white_kingside = false;
    bool white_queenside = false;
    bool black_kingside = false;
    bool black_queenside = false;

    constexpr int mask() const {
        return (white_kingside ? 1 : 0) | (white_queenside ? 2 : 0) | (black_kingside ? 4 : 0) |
               (black_queenside ? 8 : 0);
    }
    static constexpr CastlingRights from_mask(int m) {
        return {(m & 1) != 0, (m & 2) != 0, (m & 4) != 0, (m & 8) != 0};
    }
    friend constexpr bool operator==(CastlingRights, CastlingRights) = default;
};

struct Move {
    enum Flag : std::uint8_t {
        kQuiet = 0,
        kCapture = 1,
        kCastle = 2,
        kEnPassant = 4,
        kDoublePush = 8,
    };

    Square from = 0;
    Square to = 0;
    std::optional<PieceKind> promotion;
    std::uint8_t flags = kQuiet;

    bool is_capture() const { return (flags & kCapture) != 0; }
    bool is_castle() const { return (flags & kCastle) != 0; }
    bool is_en_passant() const { return (flags & kEnPassant) != 0; }
    bool is_double_push() const { return (flags & kDoublePush) != 0; }

    // Long algebraic form used by UCI, e.g. "e2e4", "e7e8q".
    std::string uci() const;

    friend bool operator==(const Move&, const Move&) = default;
};

}  // namespace llchess::chess
