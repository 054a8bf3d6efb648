#include "llchess/dataset/pgn.hpp"

#include <cctype>
#include <stdexcept>

#include "llchess/chess/fen.hpp"
#include "llchess/dataset/san.hpp"

namespace llchess::dataset {
namespace {

bool is_result(const std::string& t) { return t == "1-0" || t == "0-1" || t == "1/2-1/2" || t == "*"; }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_tag(const std::string& line, std::string& key, std::string& value) {
    if (line.size() < 2 || line.front() != '[' || line.back() != ']') return false;
    const auto space = line.find(' ');
    const auto q1 = line.find('"');
    const auto q2 = line.rfind('"');
    if (space == std::string::npos || q1 == std::string::npos || q2 <= q1) return false;
    key = line.substr(1, space - 1);
    value.clear();
    for (std::size_t i = q1 + 1; i < q2; ++i) {
        if (line[i] == '\\' && i + 1 < q2) ++i;
        value += line[i];
    }
    return true;
}

}  // namespace

void PgnReader::scan_movetext(const std::string& line, PgnGame& game) {
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        std::string t = token;
        token.clear();
        if (is_result(t)) {
            game.result = t;
            result_seen_ = true;
            return;
        }
        // Strip a leading move number such as "12." or "12...".
        std::size_t i = 0;
        while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
        if (i > 0 && i < t.size() && t[i] == '.') {
            while (i < t.size() && t[i] == '.') ++i;
            t = t.substr(i);
        } else if (i == t.size()) {
            return;  // bare number
        }
        while (!t.empty() && t.front() == '.') t.erase(0, 1);
        if (t.empty() || t.front() == '$') return;
        while (!t.empty() && (t.back() == '!' || t.back() == '?')) t.pop_back();
        if (!t.empty() && !result_seen_) game.moves.push_back(t);
    };

    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (comment_depth_ > 0) {
            if (c == '}') comment_depth_ = 0;
            continue;
        }
        if (c == '{') {
            flush();
            comment_depth_ = 1;
        } else if (c == ';') {
            flush();
            return;
        } else if (c == '(') {
            flush();
            ++variation_depth_;
        } else if (c == ')') {
            flush();
            if (variation_depth_ > 0) --variation_depth_;
        } else if (variation_depth_ > 0) {
            continue;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else {
            token += c;
        }
    }
    flush();
}

std::optional<PgnGame> PgnReader::next() {
    PgnGame game;
    bool started = false;
    bool in_movetext = false;
    comment_depth_ = 0;
    variation_depth_ = 0;
    result_seen_ = false;

    std::string raw;
    while (true) {
        if (pending_line_) {
            raw = std::move(*pending_line_);
            pending_line_.reset();
        } else if (!std::getline(in_, raw)) {
            if (in_.bad()) throw std::runtime_error("PGN stream read error");
            break;
        }
        const std::string line = trim(raw);
        if (comment_depth_ == 0 && !line.empty() && line.front() == '%') continue;
        if (comment_depth_ == 0 && variation_depth_ == 0 && !line.empty() && line.front() == '[') {
            if (in_movetext) {
                pending_line_ = raw;  // next game's tag section
                return game;
            }
            std::string key, value;
            if (parse_tag(line, key, value)) game.tags[key] = value;
            started = true;
            continue;
        }
        if (line.empty()) {
            if (in_movetext && result_seen_ && comment_depth_ == 0) return game;
            continue;
        }
        started = true;
        in_movetext = true;
        scan_movetext(line, game);
    }
    if (!started) return std::nullopt;
    return game;
}

chess::Board game_start(const PgnGame& game) {
    if (const auto it = game.tags.find("FEN"); it != game.tags.end()) return chess::parse_fen(it->second);
    return chess::Board::startpos();
}

std::vector<chess::Board> replay(const PgnGame& game) {
    std::vector<chess::Board> out;
    out.reserve(game.moves.size());
    chess::Board board = game_start(game);
    for (const auto& san : game.moves) {
        board = board.after(parse_san(board, san));
        out.push_back(board);
    }
    return out;
}

void ingest_pgn(std::istream& in, const std::function<void(const chess::Board&)>& sink, IngestStats& stats) {
    PgnReader reader(in);
    while (auto game = reader.next()) {
        ++stats.games;
        std::vector<chess::Board> positions;
        try {
            positions = replay(*game);
        } catch (const std::exception& e) {
            ++stats.games_skipped;
            stats.errors.push_back("game " + std::to_string(stats.games) + ": " + e.what());
            continue;
        }
        for (const auto& b : positions) sink(b);
        stats.positions += positions.size();
    }
}

void write_pgn(std::ostream& out, const std::map<std::string, std::string>& tags, const chess::Board& start,
               const std::vector<chess::Move>& moves, const std::string& result) {
    static const char* kRoster[] = {"Event", "Site", "Date", "Round", "White", "Black", "Result"};
    auto value_of = [&](const std::string& k) -> std::string {
        if (k == "Result") return result;
        const auto it = tags.find(k);
        return it == tags.end() ? "?" : it->second;
    };
    for (const char* k : kRoster) out << '[' << k << " \"" << value_of(k) << "\"]\n";
    for (const auto& [k, v] : tags) {
        bool in_roster = false;
        for (const char* r : kRoster) in_roster |= k == r;
        if (!in_roster) out << '[' << k << " \"" << v << "\"]\n";
    }
    out << '\n';

    std::string line;
    auto emit = [&](const std::string& token) {
        if (!line.empty() && line.size() + 1 + token.size() > 79) {
            out << line << '\n';
            line.clear();
        }
        if (!line.empty()) line += ' ';
        line += token;
    };
    chess::Board board = start;
    for (std::size_t i = 0; i < moves.size(); ++i) {
        if (board.side_to_move() == chess::Color::White)
            emit(std::to_string(board.fullmove_number()) + ".");
        else if (i == 0)
            emit(std::to_string(board.fullmove_number()) + "...");
        emit(to_san(board, moves[i]));
        board = board.after(moves[i]);
    }
    emit(result);
    out << line << "\n\n";
}

}  // namespace llchess::dataset
