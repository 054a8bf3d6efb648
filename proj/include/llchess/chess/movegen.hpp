#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string_view>

#include "llchess/chess/board.hpp"

namespace llchess::chess {

// Fixed-capacity move container; no position has more than 218 legal moves.
class MoveList {
public:
    static constexpr std::size_t kCapacity = 256;

    void push_back(const Move& m) { moves_[size_++] = m; }
    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    const Move& operator[](std::size_t i) const { return moves_[i]; }
    Move& operator[](std::size_t i) { return moves_[i]; }
    const Move* begin() const { return moves_.data(); }
    const Move* end() const { return moves_.data() + size_; }
    Move* begin() { return moves_.data(); }
    Move* end() { return moves_.data() + size_; }
    bool contains(const Move& m) const;

private:
    std::array<Move, kCapacity> moves_{};
    std::size_t size_ = 0;
};

class IllegalMove : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Moves that obey piece movement but may leave the mover's king attacked.
MoveList pseudo_legal_moves(const Board& board);
MoveList legal_moves(const Board& board);

bool is_legal(const Board& board, const Move& m);
bool is_checkmate(const Board& board);
bool is_stalemate(const Board& board);

// Checked move application: throws IllegalMove unless m is legal here.
Board apply_move(const Board& board, const Move& m);

// Resolves a UCI move string ("e2e4", "a7a8q") against the legal moves.
Move parse_uci_move(const Board& board, std::string_view text);

std::uint64_t perft(const Board& board, int depth);

}  // namespace llchess::chess
