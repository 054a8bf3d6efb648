#pragma once

#include <string>
#include <string_view>

#include "llchess/chess/movegen.hpp"

namespace llchess::dataset {

// Resolves standard algebraic notation against the legal moves of a position.
// Accepts check/mate suffixes and annotation glyphs ("Nf3+", "e8=Q#", "O-O!?").
// Throws chess::IllegalMove when nothing or more than one move matches.
chess::Move parse_san(const chess::Board& board, std::string_view san);

// Minimal-disambiguation SAN with '+' / '#' suffixes.
std::string to_san(const chess::Board& board, const chess::Move& move);

}  // namespace llchess::dataset
