#pragma once

#include <functional>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "llchess/chess/board.hpp"
#include "llchess/uci/client.hpp"

namespace llchess::bench {

// A reference-engine verdict, white-relative: centipawns, or moves to mate signed by
// the mating side (positive when white mates).
struct RefScore {
    bool mate = false;
    int value = 0;

    std::string to_string() const;  // "cp:N" or "mate:N"
    static RefScore parse(const std::string& text);
    friend bool operator==(const RefScore&, const RefScore&) = default;
};

RefScore white_relative(const uci::EngineScore& score, chess::Color side_to_move);

enum class Verdict { AgreeExact, AgreeEqualStrength, Disagree };
const char* to_string(Verdict v);

// m == b is agree-exact. Otherwise, seen from the mover: two centipawn scores within
// eps agree; two mates by the mover agree; a mate against the mover never agrees with
// anything but another mate against the mover; and our move agrees whenever the
// reference rates it at least as high as its own choice.
Verdict judge(const std::string& our_move, const std::string& ref_best, const RefScore& after_ours,
              const RefScore& after_best, chess::Color mover, int eps_cp);

struct AgreementRecord {
    std::string fen;
    std::string our_move;
    int our_value_cp = 0;  // side to move
    std::string ref_best_move;
    RefScore ref_eval_our;   // position after our move
    RefScore ref_eval_best;  // position after the reference move
    Verdict verdict = Verdict::Disagree;
    bool quarantined = false;
    std::string error;
};

struct AgreementConfig {
    int our_depth = 5;
    int ref_depth = 23;
    int eps_cp = 30;
    // Children are analyzed at ref_depth - child_depth_offset.
    int child_depth_offset = 1;
    unsigned workers = 1;
};

struct OurChoice {
    std::string move;  // UCI text
    int value_cp = 0;
};
using MovePicker = std::function<OurChoice(const chess::Board&, int depth)>;

// Records come back in input order. A position whose analysis fails twice (the
// reference handle is restarted in between) is quarantined.
std::vector<AgreementRecord> run_agreement(std::span<const std::string> fens, const MovePicker& ours,
                                           const uci::AnalyzerFactory& reference, const AgreementConfig& config);

struct AgreementSummary {
    std::size_t samples = 0;
    std::size_t quarantined = 0;
    std::size_t agree_exact = 0;
    std::size_t agree_equal = 0;
    std::size_t disagree = 0;
    // (agree_exact + agree_equal) / (samples - quarantined); 0 when nothing was judged.
    double agreement = 0.0;
};
AgreementSummary summarize(std::span<const AgreementRecord> records);

// Recorded engine outputs, one per line:
// FEN<TAB>our_move<TAB>our_cp<TAB>ref_best<TAB>ref_eval_our<TAB>ref_eval_best
// Verdicts are recomputed with judge(). '#' lines and blank lines are skipped.
std::vector<AgreementRecord> replay_recorded(std::istream& in, int eps_cp);

// One FEN per line; blank lines and '#' comments skipped. Each FEN is validated.
std::vector<std::string> read_fen_list(std::istream& in);

}  // namespace llchess::bench
