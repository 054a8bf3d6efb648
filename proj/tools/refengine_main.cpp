#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "llchess/refengine/classical.hpp"
#include "llchess/refengine/selfplay.hpp"
#include "llchess/uci/server.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Classical reference chess engine. Speaks UCI on stdin/stdout when run without a subcommand."};
    llchess::refengine::SelfplayConfig sp;
    std::string out_path;
    auto* selfplay = app.add_subcommand("selfplay", "Play engine-vs-engine games and write them as PGN");
    selfplay->add_option("--games", sp.games, "Number of games")->check(CLI::PositiveNumber);
    selfplay->add_option("--seed", sp.seed, "Random seed");
    selfplay->add_option("--random-fraction", sp.random_fraction, "Probability of a random move at each ply")
        ->check(CLI::Range(0.0, 1.0));
    selfplay->add_option("--depth", sp.search_depth, "Search depth for non-random moves")->check(CLI::Range(1, 30));
    selfplay->add_option("--max-plies", sp.max_plies, "Adjudicate a draw after this many plies")
        ->check(CLI::PositiveNumber);
    selfplay->add_option("--out", out_path, "Output PGN file (stdout if omitted)");
    CLI11_PARSE(app, argc, argv);

    if (*selfplay) {
        llchess::refengine::SelfplayStats stats;
        if (out_path.empty()) {
            stats = llchess::refengine::selfplay(std::cout, sp);
        } else {
            std::ofstream out(out_path);
            if (!out) {
                std::cerr << "cannot write " << out_path << "\n";
                return 2;
            }
            stats = llchess::refengine::selfplay(out, sp);
        }
        std::cerr << stats.games << " games, " << stats.plies << " plies, +" << stats.white_wins << " -"
                  << stats.black_wins << " =" << stats.draws << "\n";
        return 0;
    }
    llchess::refengine::ClassicalFacade engine;
    llchess::uci::server_loop(std::cin, std::cout, engine);
    return 0;
}
