#include "llchess/chess/board.hpp"

#include "llchess/chess/bitboard.hpp"
#include "llchess/chess/zobrist.hpp"

namespace llchess::chess {
namespace {

constexpr Square kA8 = 0, kE8 = 4, kH8 = 7, kA1 = 56, kE1 = 60, kH1 = 63;

// Castling rights that survive a move touching a square.
constexpr std::array<int, 64> make_castle_mask() {
    std::array<int, 64> m{};
    for (auto& v : m) v = 15;
    m[kE1] &= ~3;
    m[kH1] &= ~1;
    m[kA1] &= ~2;
    m[kE8] &= ~12;
    m[kH8] &= ~4;
    m[kA8] &= ~8;
    return m;
}
constexpr std::array<int, 64> kCastleMask = make_castle_mask();

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

namespace zobrist {
const Keys& keys() {
    static const Keys k = [] {
        Keys out;
        std::uint64_t state = 0x1CE5C0FFEEULL;
        for (auto& plane : out.piece)
            for (auto& v : plane) v = splitmix64(state);
        out.black_to_move = splitmix64(state);
        for (auto& v : out.castling) v = splitmix64(state);
        out.castling[0] = 0;
        for (auto& v : out.en_passant_file) v = splitmix64(state);
        return out;
    }();
    return k;
}
}  // namespace zobrist

char piece_char(Piece p) {
    static constexpr char kLetters[] = "pnbrqk";
    const char c = kLetters[index(p.kind)];
    return p.color == Color::White ? static_cast<char>(c - 'a' + 'A') : c;
}

std::optional<Piece> piece_from_char(char c) {
    static constexpr std::string_view kLetters = "pnbrqk";
    const bool white = c >= 'A' && c <= 'Z';
    const char lower = white ? static_cast<char>(c - 'A' + 'a') : c;
    const auto pos = kLetters.find(lower);
    if (pos == std::string_view::npos) return std::nullopt;
    return Piece{white ? Color::White : Color::Black, static_cast<PieceKind>(pos)};
}

std::string Move::uci() const {
    std::string s = square_name(from) + square_name(to);
    if (promotion) s += "nbrq"[index(*promotion) - 1];
    return s;
}

Board Board::startpos() {
    BoardSetup s;
    constexpr PieceKind back[] = {PieceKind::Rook,  PieceKind::Knight, PieceKind::Bishop, PieceKind::Queen,
                                  PieceKind::King,  PieceKind::Bishop, PieceKind::Knight, PieceKind::Rook};
    for (int f = 0; f < 8; ++f) {
        s.squares[make_square(f, 1)] = Piece{Color::White, back[f]};
        s.squares[make_square(f, 2)] = Piece{Color::White, PieceKind::Pawn};
        s.squares[make_square(f, 7)] = Piece{Color::Black, PieceKind::Pawn};
        s.squares[make_square(f, 8)] = Piece{Color::Black, back[f]};
    }
    s.castling = CastlingRights::from_mask(15);
    return from_setup(s);
}

Board Board::from_setup(const BoardSetup& setup, Validation mode) {
    Board b;
    b.mailbox_.fill(-1);
    for (Square s = 0; s < 64; ++s)
        if (setup.squares[s]) b.put(s, *setup.squares[s]);
    b.side_ = setup.side_to_move;
    b.castling_ = setup.castling.mask();
    b.en_passant_ = setup.en_passant.value_or(kNoSquare);
    b.halfmove_ = setup.halfmove_clock;
    b.fullmove_ = setup.fullmove_number;

    if (b.halfmove_ < 0) throw PositionError("halfmove", "negative halfmove clock");
    if (b.fullmove_ < 1) throw PositionError("fullmove", "fullmove number must be >= 1");
    if ((b.pieces(Color::White, PieceKind::Pawn) | b.pieces(Color::Black, PieceKind::Pawn)) & (kRank1 | kRank8))
        throw PositionError("placement", "pawn on first or last rank");
    if (popcount(b.pieces(Color::White)) > 16 || popcount(b.pieces(Color::Black)) > 16)
        throw PositionError("placement", "more than 16 pieces for one side");

    if (mode == Validation::Strict) {
        for (Color c : {Color::White, Color::Black}) {
            const int kings = popcount(b.pieces(c, PieceKind::King));
            if (kings != 1)
                throw PositionError("placement", std::string(c == Color::White ? "white" : "black") + " has " +
                                                     std::to_string(kings) + " kings");
        }
        if (in_check(b, ~b.side_)) throw PositionError("side", "side not to move is in check");

        auto has = [&](Square s, Color c, PieceKind k) {
            const auto p = b.piece_at(s);
            return p && p->color == c && p->kind == k;
        };
        const CastlingRights cr = setup.castling;
        if ((cr.white_kingside && !(has(kE1, Color::White, PieceKind::King) && has(kH1, Color::White, PieceKind::Rook))) ||
            (cr.white_queenside && !(has(kE1, Color::White, PieceKind::King) && has(kA1, Color::White, PieceKind::Rook))) ||
            (cr.black_kingside && !(has(kE8, Color::Black, PieceKind::King) && has(kH8, Color::Black, PieceKind::Rook))) ||
            (cr.black_queenside && !(has(kE8, Color::Black, PieceKind::King) && has(kA8, Color::Black, PieceKind::Rook))))
            throw PositionError("castling", "castling right without king and rook on home squares");

        if (b.en_passant_ != kNoSquare) {
            const Square ep = b.en_passant_;
            const Color mover = ~b.side_;  // side that just double-pushed
            const int expected_rank = mover == Color::White ? 3 : 6;
            const Square pawn_sq = mover == Color::White ? ep - 8 : ep + 8;
            const Square origin = mover == Color::White ? ep + 8 : ep - 8;
            if (rank_of(ep) != expected_rank || !has(pawn_sq, mover, PieceKind::Pawn) || b.piece_at(ep) ||
                b.piece_at(origin))
                throw PositionError("en-passant", "no double-pushed pawn behind " + square_name(ep));
        }
    } else if (b.en_passant_ != kNoSquare && rank_of(b.en_passant_) != 3 && rank_of(b.en_passant_) != 6) {
        throw PositionError("en-passant", "square must be on rank 3 or 6");
    }

    b.hash_ = b.compute_hash();
    return b;
}

BoardSetup Board::setup() const {
    BoardSetup s;
    for (Square sq = 0; sq < 64; ++sq) s.squares[sq] = piece_at(sq);
    s.side_to_move = side_;
    s.castling = castling();
    s.en_passant = en_passant();
    s.halfmove_clock = halfmove_;
    s.fullmove_number = fullmove_;
    return s;
}

std::optional<Piece> Board::piece_at(Square s) const {
    const int code = mailbox_[s];
    if (code < 0) return std::nullopt;
    return Piece{static_cast<Color>(code / kNumKinds), static_cast<PieceKind>(code % kNumKinds)};
}

Square Board::king_square(Color c) const {
    const Bitboard k = pieces(c, PieceKind::King);
    return k ? lsb(k) : kNoSquare;
}

Bitboard Board::attackers_to(Square s, Color attacker, Bitboard occ) const {
    const int a = index(attacker);
    const auto& p = pieces_[a];
    const Bitboard diag = p[index(PieceKind::Bishop)] | p[index(PieceKind::Queen)];
    const Bitboard straight = p[index(PieceKind::Rook)] | p[index(PieceKind::Queen)];
    return (pawn_attacks(~attacker, s) & p[index(PieceKind::Pawn)]) |
           (knight_attacks(s) & p[index(PieceKind::Knight)]) | (king_attacks(s) & p[index(PieceKind::King)]) |
           (bishop_attacks(s, occ) & diag) | (rook_attacks(s, occ) & straight);
}

bool Board::attacked_by(Square s, Color attacker) const { return attackers_to(s, attacker, occupied()) != 0; }

void Board::put(Square s, Piece p) {
    pieces_[index(p.color)][index(p.kind)] |= bit(s);
    occupancy_[index(p.color)] |= bit(s);
    mailbox_[s] = static_cast<std::int8_t>(index(p.color) * kNumKinds + index(p.kind));
}

void Board::remove(Square s) {
    const auto p = piece_at(s);
    if (!p) return;
    pieces_[index(p->color)][index(p->kind)] &= ~bit(s);
    occupancy_[index(p->color)] &= ~bit(s);
    mailbox_[s] = -1;
}

std::uint64_t Board::compute_hash() const {
    const auto& k = zobrist::keys();
    std::uint64_t h = 0;
    for (Square s = 0; s < 64; ++s)
        if (const auto p = piece_at(s)) h ^= zobrist::piece_key(*p, s);
    if (side_ == Color::Black) h ^= k.black_to_move;
    h ^= k.castling[castling_];
    if (en_passant_ != kNoSquare) h ^= k.en_passant_file[file_of(en_passant_)];
    return h;
}

Board Board::after(const Move& m) const {
    const auto& keys = zobrist::keys();
    Board b = *this;
    const Piece mover = *piece_at(m.from);
    const Color us = side_;

    if (b.en_passant_ != kNoSquare) b.hash_ ^= keys.en_passant_file[file_of(b.en_passant_)];
    b.en_passant_ = kNoSquare;

    bool capture = false;
    if (m.is_en_passant()) {
        const Square victim = us == Color::White ? m.to + 8 : m.to - 8;
        b.hash_ ^= zobrist::piece_key(*b.piece_at(victim), victim);
        b.remove(victim);
        capture = true;
    } else if (const auto victim = b.piece_at(m.to)) {
        b.hash_ ^= zobrist::piece_key(*victim, m.to);
        b.remove(m.to);
        capture = true;
    }

    b.hash_ ^= zobrist::piece_key(mover, m.from);
    b.remove(m.from);
    const Piece placed = m.promotion ? Piece{us, *m.promotion} : mover;
    b.put(m.to, placed);
    b.hash_ ^= zobrist::piece_key(placed, m.to);

    if (m.is_castle()) {
        const bool kingside = file_of(m.to) == 6;
        const Square rook_from = kingside ? m.to + 1 : m.to - 2;
        const Square rook_to = kingside ? m.to - 1 : m.to + 1;
        const Piece rook{us, PieceKind::Rook};
        b.hash_ ^= zobrist::piece_key(rook, rook_from) ^ zobrist::piece_key(rook, rook_to);
        b.remove(rook_from);
        b.put(rook_to, rook);
    }

    const int new_castling = b.castling_ & kCastleMask[m.from] & kCastleMask[m.to];
    if (new_castling != b.castling_) {
        b.hash_ ^= keys.castling[b.castling_] ^ keys.castling[new_castling];
        b.castling_ = new_castling;
    }

    if (m.is_double_push()) {
        b.en_passant_ = (m.from + m.to) / 2;
        b.hash_ ^= keys.en_passant_file[file_of(b.en_passant_)];
    }

    b.halfmove_ = (capture || mover.kind == PieceKind::Pawn) ? 0 : halfmove_ + 1;
    if (us == Color::Black) ++b.fullmove_;
    b.side_ = ~us;
    b.hash_ ^= keys.black_to_move;
    return b;
}

Board Board::after_null() const {
    const auto& keys = zobrist::keys();
    Board b = *this;
    if (b.en_passant_ != kNoSquare) b.hash_ ^= keys.en_passant_file[file_of(b.en_passant_)];
    b.en_passant_ = kNoSquare;
    b.side_ = ~side_;
    b.hash_ ^= keys.black_to_move;
    return b;
}

bool in_check(const Board& board, Color c) {
    const Square k = board.king_square(c);
    return k != kNoSquare && board.attacked_by(k, ~c);
}

}  // namespace llchess::chess
