#include "llchess/dataset/san.hpp"

#include <optional>

namespace llchess::dataset {

using chess::Board;
using chess::Move;
using chess::PieceKind;

namespace {

std::optional<PieceKind> kind_from_letter(char c) {
    switch (c) {
        case 'N': return PieceKind::Knight;
        case 'B': return PieceKind::Bishop;
        case 'R': return PieceKind::Rook;
        case 'Q': return PieceKind::Queen;
        case 'K': return PieceKind::King;
        default: return std::nullopt;
    }
}

char letter(PieceKind k) { return "PNBRQK"[chess::index(k)]; }

}  // namespace

Move parse_san(const Board& board, std::string_view san) {
    const std::string original(san);
    while (!san.empty() && (san.back() == '+' || san.back() == '#' || san.back() == '!' || san.back() == '?'))
        san.remove_suffix(1);
    const auto moves = chess::legal_moves(board);

    if (san == "O-O" || san == "0-0" || san == "O-O-O" || san == "0-0-0") {
        const int file = san.size() == 3 ? 6 : 2;
        for (const Move& m : moves)
            if (m.is_castle() && chess::file_of(m.to) == file) return m;
        throw chess::IllegalMove("castling not legal: " + original);
    }

    PieceKind kind = PieceKind::Pawn;
    if (!san.empty()) {
        if (const auto k = kind_from_letter(san.front())) {
            kind = *k;
            san.remove_prefix(1);
        }
    }
    std::optional<PieceKind> promotion;
    if (const auto eq = san.find('='); eq != std::string_view::npos) {
        if (eq + 2 != san.size()) throw chess::IllegalMove("bad promotion in " + original);
        promotion = kind_from_letter(san[eq + 1]);
        if (!promotion || *promotion == PieceKind::King) throw chess::IllegalMove("bad promotion in " + original);
        san = san.substr(0, eq);
    } else if (kind == PieceKind::Pawn && !san.empty() && kind_from_letter(san.back())) {
        promotion = kind_from_letter(san.back());  // "e8Q"
        san.remove_suffix(1);
    }
    if (san.size() < 2) throw chess::IllegalMove("malformed SAN: " + original);
    const auto to = chess::parse_square(san.substr(san.size() - 2));
    if (!to) throw chess::IllegalMove("malformed SAN: " + original);
    san.remove_suffix(2);
    if (!san.empty() && san.back() == 'x') san.remove_suffix(1);

    std::optional<int> from_file, from_rank;
    for (const char c : san) {
        if (c >= 'a' && c <= 'h')
            from_file = c - 'a';
        else if (c >= '1' && c <= '8')
            from_rank = c - '0';
        else
            throw chess::IllegalMove("malformed SAN: " + original);
    }

    std::optional<Move> found;
    for (const Move& m : moves) {
        const auto p = board.piece_at(m.from);
        if (!p || p->kind != kind || m.to != *to || m.promotion != promotion) continue;
        if (from_file && chess::file_of(m.from) != *from_file) continue;
        if (from_rank && chess::rank_of(m.from) != *from_rank) continue;
        if (m.is_castle()) continue;
        if (found) throw chess::IllegalMove("ambiguous SAN: " + original);
        found = m;
    }
    if (!found) throw chess::IllegalMove("no legal move matches " + original);
    return *found;
}

std::string to_san(const Board& board, const Move& move) {
    std::string out;
    const PieceKind kind = board.piece_at(move.from)->kind;
    if (move.is_castle()) {
        out = chess::file_of(move.to) == 6 ? "O-O" : "O-O-O";
    } else if (kind == PieceKind::Pawn) {
        if (move.is_capture()) out += static_cast<char>('a' + chess::file_of(move.from)), out += 'x';
        out += chess::square_name(move.to);
        if (move.promotion) out += '=', out += letter(*move.promotion);
    } else {
        out += letter(kind);
        bool ambiguous = false, same_file = false, same_rank = false;
        for (const Move& m : chess::legal_moves(board)) {
            if (m == move || m.to != move.to || board.piece_at(m.from)->kind != kind) continue;
            ambiguous = true;
            same_file |= chess::file_of(m.from) == chess::file_of(move.from);
            same_rank |= chess::rank_of(m.from) == chess::rank_of(move.from);
        }
        const bool need_file = ambiguous && (!same_file || same_rank);
        const bool need_rank = ambiguous && same_file;
        if (need_file) out += static_cast<char>('a' + chess::file_of(move.from));
        if (need_rank) out += static_cast<char>('0' + chess::rank_of(move.from));
        if (move.is_capture()) out += 'x';
        out += chess::square_name(move.to);
    }
    const Board next = board.after(move);
    if (chess::in_check(next, next.side_to_move())) out += chess::legal_moves(next).empty() ? '#' : '+';
    return out;
}

}  // namespace llchess::dataset
