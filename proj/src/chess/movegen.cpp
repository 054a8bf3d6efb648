#include "llchess/chess/movegen.hpp"

#include <algorithm>
#include <string>

#include "llchess/chess/bitboard.hpp"

namespace llchess::chess {
namespace {

void add_pawn_move(MoveList& out, Square from, Square to, std::uint8_t flags) {
    const int r = rank_of(to);
    if (r == 1 || r == 8) {
        for (PieceKind k : {PieceKind::Queen, PieceKind::Rook, PieceKind::Bishop, PieceKind::Knight})
            out.push_back(Move{from, to, k, flags});
    } else {
        out.push_back(Move{from, to, std::nullopt, flags});
    }
}

void add_targets(MoveList& out, const Board& board, Square from, Bitboard targets) {
    const Bitboard enemy = board.pieces(~board.side_to_move());
    while (targets) {
        const Square to = pop_lsb(targets);
        out.push_back(Move{from, to, std::nullopt, (enemy & bit(to)) ? Move::kCapture : Move::kQuiet});
    }
}

void generate_pawns(MoveList& out, const Board& board) {
    const Color us = board.side_to_move();
    const Bitboard occ = board.occupied();
    const Bitboard enemy = board.pieces(~us);
    const int forward = us == Color::White ? -8 : 8;
    const int start_rank = us == Color::White ? 2 : 7;

    Bitboard pawns = board.pieces(us, PieceKind::Pawn);
    while (pawns) {
        const Square from = pop_lsb(pawns);
        const Square one = from + forward;
        if (!(occ & bit(one))) {
            add_pawn_move(out, from, one, Move::kQuiet);
            const Square two = one + forward;
            if (rank_of(from) == start_rank && !(occ & bit(two)))
                out.push_back(Move{from, two, std::nullopt, Move::kDoublePush});
        }
        Bitboard caps = pawn_attacks(us, from) & enemy;
        while (caps) add_pawn_move(out, from, pop_lsb(caps), Move::kCapture);
        if (const auto ep = board.en_passant(); ep && (pawn_attacks(us, from) & bit(*ep)))
            out.push_back(Move{from, *ep, std::nullopt, Move::kCapture | Move::kEnPassant});
    }
}

void generate_castling(MoveList& out, const Board& board) {
    const Color us = board.side_to_move();
    const Color them = ~us;
    const CastlingRights cr = board.castling();
    const bool kingside = us == Color::White ? cr.white_kingside : cr.black_kingside;
    const bool queenside = us == Color::White ? cr.white_queenside : cr.black_queenside;
    if (!kingside && !queenside) return;
    const int rank = us == Color::White ? 1 : 8;
    const Square king = make_square(4, rank);
    if (board.king_square(us) != king || board.attacked_by(king, them)) return;
    const Bitboard occ = board.occupied();
    auto empty = [&](int f) { return !(occ & bit(make_square(f, rank))); };
    auto safe = [&](int f) { return !board.attacked_by(make_square(f, rank), them); };
    if (kingside && empty(5) && empty(6) && safe(5) && safe(6))
        out.push_back(Move{king, make_square(6, rank), std::nullopt, Move::kCastle});
    if (queenside && empty(3) && empty(2) && empty(1) && safe(3) && safe(2))
        out.push_back(Move{king, make_square(2, rank), std::nullopt, Move::kCastle});
}

}  // namespace

bool MoveList::contains(const Move& m) const { return std::find(begin(), end(), m) != end(); }

MoveList pseudo_legal_moves(const Board& board) {
    MoveList out;
    const Color us = board.side_to_move();
    const Bitboard own = board.pieces(us);
    const Bitboard occ = board.occupied();

    generate_pawns(out, board);
    for (Bitboard b = board.pieces(us, PieceKind::Knight); b;) {
        const Square s = pop_lsb(b);
        add_targets(out, board, s, knight_attacks(s) & ~own);
    }
    for (Bitboard b = board.pieces(us, PieceKind::Bishop); b;) {
        const Square s = pop_lsb(b);
        add_targets(out, board, s, bishop_attacks(s, occ) & ~own);
    }
    for (Bitboard b = board.pieces(us, PieceKind::Rook); b;) {
        const Square s = pop_lsb(b);
        add_targets(out, board, s, rook_attacks(s, occ) & ~own);
    }
    for (Bitboard b = board.pieces(us, PieceKind::Queen); b;) {
        const Square s = pop_lsb(b);
        add_targets(out, board, s, queen_attacks(s, occ) & ~own);
    }
    for (Bitboard b = board.pieces(us, PieceKind::King); b;) {
        const Square s = pop_lsb(b);
        add_targets(out, board, s, king_attacks(s) & ~own);
    }
    generate_castling(out, board);
    return out;
}

MoveList legal_moves(const Board& board) {
    const Color us = board.side_to_move();
    MoveList out;
    for (const Move& m : pseudo_legal_moves(board))
        if (!in_check(board.after(m), us)) out.push_back(m);
    return out;
}

bool is_legal(const Board& board, const Move& m) { return legal_moves(board).contains(m); }

bool is_checkmate(const Board& board) {
    return in_check(board, board.side_to_move()) && legal_moves(board).empty();
}

bool is_stalemate(const Board& board) {
    return !in_check(board, board.side_to_move()) && legal_moves(board).empty();
}

Board apply_move(const Board& board, const Move& m) {
    if (!is_legal(board, m)) throw IllegalMove("illegal move " + m.uci());
    return board.after(m);
}

Move parse_uci_move(const Board& board, std::string_view text) {
    for (const Move& m : legal_moves(board))
        if (m.uci() == text) return m;
    throw IllegalMove("illegal or malformed move '" + std::string(text) + "'");
}

std::uint64_t perft(const Board& board, int depth) {
    if (depth == 0) return 1;
    const MoveList moves = legal_moves(board);
    if (depth == 1) return moves.size();
    std::uint64_t nodes = 0;
    for (const Move& m : moves) nodes += perft(board.after(m), depth - 1);
    return nodes;
}

}  // namespace llchess::chess
