#pragma once

#include <string>
#include <string_view>

#include "llchess/chess/board.hpp"

namespace llchess::chess {

inline constexpr std::string_view kStartFen = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

// Accepts 4 to 6 fields; missing clocks default to "0 1".
// Throws PositionError naming the offending field.
Board parse_fen(std::string_view text, Validation mode = Validation::Strict);

std::string serialize_fen(const Board& board);

}  // namespace llchess::chess
