#pragma once

#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "llchess/chess/board.hpp"
#include "llchess/chess/movegen.hpp"

namespace llchess::dataset {

struct PgnGame {
    std::map<std::string, std::string> tags;
    std::vector<std::string> moves;  // mainline SAN tokens
    std::string result = "*";
};

// Streams games out of PGN text. Comments, NAGs, move numbers and variations
// are dropped; only the mainline survives.
class PgnReader {
public:
    explicit PgnReader(std::istream& in) : in_(in) {}
    std::optional<PgnGame> next();

private:
    void scan_movetext(const std::string& line, PgnGame& game);

    std::istream& in_;
    std::optional<std::string> pending_line_;
    int comment_depth_ = 0;
    int variation_depth_ = 0;
    bool result_seen_ = false;
};

// Start position of a game (honours the FEN tag) and the position after every
// mainline half-move. Throws chess::IllegalMove / chess::PositionError.
chess::Board game_start(const PgnGame& game);
std::vector<chess::Board> replay(const PgnGame& game);

struct IngestStats {
    std::size_t games = 0;
    std::size_t games_skipped = 0;
    std::size_t positions = 0;
    std::vector<std::string> errors;  // one line per skipped game
};

// Emits the position after every mainline half-move of every game; the shared start
// position is not emitted. Games with an illegal or unparsable move contribute
// nothing and are tallied in stats. Throws std::runtime_error if the stream fails.
void ingest_pgn(std::istream& in, const std::function<void(const chess::Board&)>& sink, IngestStats& stats);

// Writes one game with Seven Tag Roster style headers and 80-column movetext.
void write_pgn(std::ostream& out, const std::map<std::string, std::string>& tags, const chess::Board& start,
               const std::vector<chess::Move>& moves, const std::string& result);

}  // namespace llchess::dataset
