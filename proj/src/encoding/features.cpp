#include "llchess/encoding/features.hpp"

#include "llchess/chess/bitboard.hpp"

namespace llchess::encoding {

using chess::Board;
using chess::Color;
using chess::PieceKind;

FeatureVector encode(const Board& board) {
    FeatureVector v{};
    for (const std::uint32_t i : active_features(board)) v[i] = 1;
    return v;
}

std::vector<std::uint32_t> active_features(const Board& board) {
    std::vector<std::uint32_t> out;
    out.reserve(40);
    for (Color c : {Color::White, Color::Black})
        for (int k = 0; k < chess::kNumKinds; ++k) {
            const auto kind = static_cast<PieceKind>(k);
            chess::Bitboard b = board.pieces(c, kind);
            // pop_lsb yields ascending squares, so the output stays sorted.
            while (b) out.push_back(static_cast<std::uint32_t>(feature_index(c, kind, chess::pop_lsb(b))));
        }
    if (board.side_to_move() == Color::White) out.push_back(kTurnBit);
    const auto cr = board.castling();
    if (cr.white_kingside) out.push_back(kCastlingBits + 0);
    if (cr.white_queenside) out.push_back(kCastlingBits + 1);
    if (cr.black_kingside) out.push_back(kCastlingBits + 2);
    if (cr.black_queenside) out.push_back(kCastlingBits + 3);
    if (chess::in_check(board, Color::White)) out.push_back(kCheckBits + 0);
    if (chess::in_check(board, Color::Black)) out.push_back(kCheckBits + 1);
    return out;
}

Board decode(std::span<const std::uint8_t> bits, chess::Validation mode) {
    if (bits.size() != kFeatureCount)
        throw DecodeError({}, "feature vector must have 775 elements, got " + std::to_string(bits.size()));
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] > 1) throw DecodeError({}, "feature " + std::to_string(i) + " is not binary");

    chess::BoardSetup setup;
    std::vector<chess::Square> conflicts;
    for (chess::Square s = 0; s < 64; ++s) {
        int claims = 0;
        for (std::size_t plane = 0; plane < kPlaneCount; ++plane) {
            if (!bits[plane * 64 + static_cast<std::size_t>(s)]) continue;
            ++claims;
            setup.squares[s] = chess::Piece{static_cast<Color>(plane / 6), static_cast<PieceKind>(plane % 6)};
        }
        if (claims > 1) conflicts.push_back(s);
    }
    if (!conflicts.empty()) {
        std::string names;
        for (auto s : conflicts) names += (names.empty() ? "" : ",") + chess::square_name(s);
        throw DecodeError(conflicts, "conflicting planes on " + names);
    }
    setup.side_to_move = bits[kTurnBit] ? Color::White : Color::Black;
    setup.castling = {bits[kCastlingBits] != 0, bits[kCastlingBits + 1] != 0, bits[kCastlingBits + 2] != 0,
                      bits[kCastlingBits + 3] != 0};
    return Board::from_setup(setup, mode);
}

FeatureVector binarize(std::span<const float> values, float threshold) {
    FeatureVector v{};
    for (std::size_t i = 0; i < kFeatureCount && i < values.size(); ++i) v[i] = values[i] >= threshold ? 1 : 0;
    return v;
}

std::string to_hex(const FeatureVector& v) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve((kFeatureCount + 7) / 8 * 2);
    for (std::size_t byte = 0; byte < (kFeatureCount + 7) / 8; ++byte) {
        unsigned value = 0;
        for (std::size_t b = 0; b < 8; ++b) {
            const std::size_t i = byte * 8 + b;
            value = (value << 1) | (i < kFeatureCount ? v[i] : 0u);
        }
        out += kDigits[value >> 4];
        out += kDigits[value & 15];
    }
    return out;
}

FeatureVector from_hex(std::string_view hex) {
    if (hex.size() != (kFeatureCount + 7) / 8 * 2) throw std::invalid_argument("feature hex has wrong length");
    auto nibble = [](char c) -> unsigned {
        if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
        throw std::invalid_argument("bad hex digit in feature dump");
    };
    FeatureVector v{};
    for (std::size_t byte = 0; byte * 2 < hex.size(); ++byte) {
        const unsigned value = nibble(hex[2 * byte]) << 4 | nibble(hex[2 * byte + 1]);
        for (std::size_t b = 0; b < 8; ++b) {
            const std::size_t i = byte * 8 + b;
            const unsigned set = (value >> (7 - b)) & 1u;
            if (i < kFeatureCount)
                v[i] = static_cast<std::uint8_t>(set);
            else if (set)
                throw std::invalid_argument("feature hex has padding bits set");
        }
    }
    return v;
}

FeatureKey feature_key(const Board& board) {
    FeatureKey key;
    for (Color c : {Color::White, Color::Black})
        for (int k = 0; k < chess::kNumKinds; ++k)
            key.planes[plane_index(c, static_cast<PieceKind>(k))] = board.pieces(c, static_cast<PieceKind>(k));
    key.turn_and_castling =
        static_cast<std::uint8_t>((board.side_to_move() == Color::White ? 16 : 0) | board.castling().mask());
    return key;
}

std::size_t FeatureKeyHash::operator()(const FeatureKey& k) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ k.turn_and_castling;
    for (const auto p : k.planes) {
        h ^= p + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
        h *= 0xBF58476D1CE4E5B9ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 31));
}

}  // namespace llchess::encoding
