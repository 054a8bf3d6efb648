#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "llchess/chess/board.hpp"

namespace llchess::encoding {

// Layout of the 775-feature board vector:
//   [0, 768)   12 piece planes of 64 squares, plane = color * 6 + kind, with kinds in
//              pawn, knight, bishop, rook, queen, king order (white planes first).
//              Square order inside a plane is a8..h8, a7..h7, ..., a1..h1.
//   768        turn bit, 1 when white is to move
//   769..772   castling rights: white kingside, white queenside, black kingside, black queenside
//   773, 774   white in check, black in check
// En passant and the move clocks are not represented.
inline constexpr std::size_t kFeatureCount = 775;
inline constexpr std::size_t kPlaneCount = 12;
inline constexpr std::size_t kTurnBit = 768;
inline constexpr std::size_t kCastlingBits = 769;
inline constexpr std::size_t kCheckBits = 773;

constexpr std::size_t plane_index(chess::Color c, chess::PieceKind k) {
    return static_cast<std::size_t>(chess::index(c) * chess::kNumKinds + chess::index(k));
}
constexpr std::size_t feature_index(chess::Color c, chess::PieceKind k, chess::Square s) {
    return plane_index(c, k) * 64 + static_cast<std::size_t>(s);
}

// One byte per feature, each 0 or 1.
using FeatureVector = std::array<std::uint8_t, kFeatureCount>;

FeatureVector encode(const chess::Board& board);

// Indices of the set features in ascending order; at most 32 + 7 entries.
std::vector<std::uint32_t> active_features(const chess::Board& board);

class DecodeError : public std::invalid_argument {
public:
    DecodeError(std::vector<chess::Square> squares, const std::string& what)
        : std::invalid_argument(what), squares_(std::move(squares)) {}
    const std::vector<chess::Square>& squares() const { return squares_; }

private:
    std::vector<chess::Square> squares_;
};

// Inverse of encode for placement, turn and castling. En passant is cleared and
// clocks are reset to 0/1. Check bits are ignored (they are implied by placement).
// Throws DecodeError listing every square claimed by more than one plane, and for
// elements outside {0, 1}.
chess::Board decode(std::span<const std::uint8_t> bits, chess::Validation mode = chess::Validation::Lenient);

// Thresholds a real-valued reconstruction at 0.5 before decoding.
FeatureVector binarize(std::span<const float> values, float threshold = 0.5f);

// Lowercase hex of the 775 bytes packed 8 features per byte, MSB first (97 bytes, zero-padded).
std::string to_hex(const FeatureVector& v);
FeatureVector from_hex(std::string_view hex);

// Identity under which the models cannot distinguish positions: placement, turn, castling.
struct FeatureKey {
    std::array<chess::Bitboard, kPlaneCount> planes{};
    std::uint8_t turn_and_castling = 0;

    friend bool operator==(const FeatureKey&, const FeatureKey&) = default;
};
FeatureKey feature_key(const chess::Board& board);

struct FeatureKeyHash {
    std::size_t operator()(const FeatureKey& k) const noexcept;
};

}  // namespace llchess::encoding
