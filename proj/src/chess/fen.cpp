#include "llchess/chess/fen.hpp"

#include <charconv>
#include <sstream>
#include <vector>

namespace llchess::chess {
namespace {

std::vector<std::string_view> split_fields(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

int parse_int(std::string_view s, const char* field) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw PositionError(field, "not an integer: " + std::string(s));
    return v;
}

}  // namespace

Board parse_fen(std::string_view text, Validation mode) {
    const auto fields = split_fields(text);
    if (fields.size() < 4 || fields.size() > 6)
        throw PositionError("fields", "expected 4 to 6 fields, got " + std::to_string(fields.size()));

    BoardSetup setup;
    int rank = 8;
    int file = 0;
    for (const char c : fields[0]) {
        if (c == '/') {
            if (file != 8) throw PositionError("placement", "rank " + std::to_string(rank) + " does not have 8 files");
            if (--rank < 1) throw PositionError("placement", "more than 8 ranks");
            file = 0;
        } else if (c >= '1' && c <= '8') {
            file += c - '0';
            if (file > 8) throw PositionError("placement", "rank " + std::to_string(rank) + " overflows");
        } else if (const auto p = piece_from_char(c)) {
            if (file >= 8) throw PositionError("placement", "rank " + std::to_string(rank) + " overflows");
            setup.squares[make_square(file++, rank)] = *p;
        } else {
            throw PositionError("placement", std::string("illegal piece character '") + c + "'");
        }
    }
    if (rank != 1 || file != 8) throw PositionError("placement", "expected 8 complete ranks");

    if (fields[1] == "w")
        setup.side_to_move = Color::White;
    else if (fields[1] == "b")
        setup.side_to_move = Color::Black;
    else
        throw PositionError("side", "expected 'w' or 'b', got '" + std::string(fields[1]) + "'");

    if (fields[2] != "-") {
        for (const char c : fields[2]) {
            bool* flag = nullptr;
            switch (c) {
                case 'K': flag = &setup.castling.white_kingside; break;
                case 'Q': flag = &setup.castling.white_queenside; break;
                case 'k': flag = &setup.castling.black_kingside; break;
                case 'q': flag = &setup.castling.black_queenside; break;
                default: throw PositionError("castling", std::string("illegal castling character '") + c + "'");
            }
            if (*flag) throw PositionError("castling", std::string("duplicate castling character '") + c + "'");
            *flag = true;
        }
    }

    if (fields[3] != "-") {
        const auto sq = parse_square(fields[3]);
        if (!sq) throw PositionError("en-passant", "bad square '" + std::string(fields[3]) + "'");
        setup.en_passant = *sq;
    }

    if (fields.size() >= 5) setup.halfmove_clock = parse_int(fields[4], "halfmove");
    if (fields.size() >= 6) setup.fullmove_number = parse_int(fields[5], "fullmove");

    return Board::from_setup(setup, mode);
}

std::string serialize_fen(const Board& board) {
    std::string out;
    for (int rank = 8; rank >= 1; --rank) {
        int empty = 0;
        for (int file = 0; file < 8; ++file) {
            const auto p = board.piece_at(make_square(file, rank));
            if (!p) {
                ++empty;
                continue;
            }
            if (empty) out += static_cast<char>('0' + empty);
            empty = 0;
            out += piece_char(*p);
        }
        if (empty) out += static_cast<char>('0' + empty);
        if (rank > 1) out += '/';
    }
    out += board.side_to_move() == Color::White ? " w " : " b ";
    const CastlingRights cr = board.castling();
    std::string castle;
    if (cr.white_kingside) castle += 'K';
    if (cr.white_queenside) castle += 'Q';
    if (cr.black_kingside) castle += 'k';
    if (cr.black_queenside) castle += 'q';
    out += castle.empty() ? "-" : castle;
    out += ' ';
    out += board.en_passant() ? square_name(*board.en_passant()) : "-";
    out += ' ' + std::to_string(board.halfmove_clock()) + ' ' + std::to_string(board.fullmove_number());
    return out;
}

}  // namespace llchess::chess
