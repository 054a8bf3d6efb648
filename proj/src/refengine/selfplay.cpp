#include "llchess/refengine/selfplay.hpp"

#include <random>
#include <unordered_map>

#include "llchess/chess/bitboard.hpp"
#include "llchess/chess/movegen.hpp"
#include "llchess/dataset/pgn.hpp"
#include "llchess/nn/network.hpp"
#include "llchess/refengine/classical.hpp"

namespace llchess::refengine {

using chess::Board;
using chess::PieceKind;

namespace {

bool insufficient_material(const Board& b) {
    using chess::Color;
    for (const Color c : {Color::White, Color::Black})
        if (b.pieces(c, PieceKind::Pawn) | b.pieces(c, PieceKind::Rook) | b.pieces(c, PieceKind::Queen)) return false;
    const int minors = chess::popcount(b.pieces(Color::White) | b.pieces(Color::Black)) - 2;
    return minors <= 1;
}

}  // namespace

SelfplayStats selfplay(std::ostream& out, const SelfplayConfig& config) {
    SelfplayStats stats;
    ClassicalEngine engine(1 << 16);
    for (int g = 0; g < config.games; ++g) {
        std::mt19937_64 rng(nn::detail::mix(config.seed, static_cast<std::uint64_t>(g)));
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        engine.new_game();
        const Board start = Board::startpos();
        Board board = start;
        std::vector<chess::Move> moves;
        std::vector<std::uint64_t> history;
        std::unordered_map<std::uint64_t, int> seen{{board.hash(), 1}};
        std::string result = "1/2-1/2";
        while (true) {
            const auto legal = chess::legal_moves(board);
            if (legal.empty()) {
                if (chess::in_check(board, board.side_to_move()))
                    result = board.side_to_move() == chess::Color::White ? "0-1" : "1-0";
                break;
            }
            if (board.halfmove_clock() >= 100 || insufficient_material(board) ||
                static_cast<int>(moves.size()) >= config.max_plies)
                break;
            chess::Move m;
            if (coin(rng) < config.random_fraction) {
                m = legal[rng() % legal.size()];
            } else {
                Limits limits;
                limits.depth = config.search_depth;
                m = engine.search(board, history, limits).best;
            }
            history.push_back(board.hash());
            moves.push_back(m);
            board = board.after(m);
            if (++seen[board.hash()] >= 3) break;
        }
        ++stats.games;
        stats.plies += static_cast<long long>(moves.size());
        if (result == "1-0")
            ++stats.white_wins;
        else if (result == "0-1")
            ++stats.black_wins;
        else
            ++stats.draws;
        dataset::write_pgn(out,
                           {{"Event", "selfplay"}, {"Site", "local"}, {"Date", "????.??.??"},
                            {"Round", std::to_string(g + 1)}, {"White", "llchess-ref"}, {"Black", "llchess-ref"}},
                           start, moves, result);
    }
    return stats;
}

}  // namespace llchess::refengine
