#include <CLI11.hpp>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "llchess/bench/agreement.hpp"
#include "llchess/bench/filtered.hpp"
#include "llchess/bench/report.hpp"
#include "llchess/chess/fen.hpp"
#include "llchess/chess/movegen.hpp"
#include "llchess/dataset/pipeline.hpp"
#include "llchess/nn/weights_io.hpp"
#include "llchess/search/search.hpp"
#include "llchess/uci/server.hpp"

namespace fs = std::filesystem;
using namespace llchess;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kEngine = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char* kAutoencoderFile = "autoencoder.w";
const char* kClassifierFile = "classifier.w";
const char* kEvaluatorFile = "evaluator.w";

// Resolves an engine program the way execvp would and fails early when it is missing.
std::string resolve_engine(const std::string& program) {
    if (program.empty()) throw UsageError("no engine given");
    if (program.find('/') != std::string::npos) {
        if (::access(program.c_str(), X_OK) != 0) throw uci::EngineError("engine not executable: " + program);
        return program;
    }
    const char* path = std::getenv("PATH");
    std::stringstream dirs(path ? path : "");
    for (std::string dir; std::getline(dirs, dir, ':');) {
        const auto candidate = fs::path(dir.empty() ? "." : dir) / program;
        if (::access(candidate.c_str(), X_OK) == 0) return candidate.string();
    }
    throw uci::EngineError("engine not found on PATH: " + program);
}

uci::EngineConfig engine_config(const std::string& program, const std::vector<std::string>& args,
                                const std::vector<std::string>& options, int timeout_ms) {
    uci::EngineConfig c;
    c.program = resolve_engine(program);
    c.args = args;
    for (const auto& o : options) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw UsageError("engine option must be Name=Value: " + o);
        c.options.emplace_back(o.substr(0, eq), o.substr(eq + 1));
    }
    c.timeout = std::chrono::milliseconds(timeout_ms);
    return c;
}

models::Network load_model(const fs::path& dir, const char* file) {
    const auto path = dir / file;
    if (!fs::exists(path)) throw DataError("missing model file " + path.string());
    return nn::load_params(path);
}

chess::Board board_from_arg(const std::string& text) {
    return text == "startpos" ? chess::Board::startpos() : chess::parse_fen(text);
}

void check_file(const fs::path& p) {
    if (!fs::is_regular_file(p)) throw DataError("no such file: " + p.string());
}

// ---- dataset ----------------------------------------------------------------

struct DatasetArgs {
    std::vector<std::string> pgn;
    std::string out;
    std::string engine;
    std::vector<std::string> engine_args;
    std::vector<std::string> engine_options;
    int depth = dataset::kDefaultLabelDepth;
    double expand_fraction = 0.5;
    double train_fraction = 0.88;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::size_t max_positions = 0;
    bool cache = false;
    int timeout_ms = 120000;
};

int cmd_dataset(const DatasetArgs& a) {
    for (const auto& p : a.pgn) check_file(p);
    dataset::PipelineConfig cfg;
    cfg.pgn_files.assign(a.pgn.begin(), a.pgn.end());
    cfg.out_dir = a.out;
    cfg.expand_fraction = a.expand_fraction;
    cfg.train_fraction = a.train_fraction;
    cfg.seed = a.seed;
    cfg.label.depth = a.depth;
    cfg.label.workers = a.workers;
    cfg.max_positions = a.max_positions;
    cfg.write_cache = a.cache;
    const auto ec = engine_config(a.engine, a.engine_args, a.engine_options, a.timeout_ms);
    // Fail before touching the output directory if the engine cannot even handshake.
    { uci::uci_engine_factory(ec)(); }

    const auto report = dataset::run_pipeline(cfg, uci::uci_engine_factory(ec));
    std::cerr << "games " << report.ingest.games << " (skipped " << report.ingest.games_skipped << "), positions "
              << report.ingest.positions << ", unique " << report.unique_positions << ", duplicates removed "
              << report.duplicates_removed << ", expanded " << report.expanded << ", quarantined "
              << report.label.quarantined << ", train " << report.train << ", test " << report.test << "\n";
    for (const auto& e : report.ingest.errors) std::cerr << "skipped " << e << "\n";
    std::cout << "bin_lo\tbin_hi\tcount\n";
    for (int i = 0; i < dataset::CorpusStats::kBins; ++i)
        std::cout << dataset::CorpusStats::bin_edge(i) << '\t' << dataset::CorpusStats::bin_edge(i + 1) << '\t'
                  << report.stats.histogram[static_cast<std::size_t>(i)] << '\n';
    return kOk;
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
    std::string model;
    std::string train;
    std::string test;
    std::string models = "models";
    std::string metrics;
    int epochs = 10;
    std::size_t batch_size = 256;
    double lr = 0.001;
    double beta1 = 0.90;
    double beta2 = 0.999;
    std::uint64_t seed = 0;  // 0: the model's documented default seed
    long width = models::kEvaluatorWidth;
    std::size_t max_train = 0;
};

models::EncodedCorpus load_corpus(const std::string& path, std::size_t limit) {
    check_file(path);
    auto samples = dataset::read_samples(path);
    if (limit && samples.size() > limit) samples.resize(limit);
    return dataset::encode_samples(samples);
}

int cmd_train(const TrainArgs& a) {
    const fs::path dir = a.models;
    if (a.model == "evaluator" && !fs::exists(dir / kAutoencoderFile))
        throw DataError("evaluator training needs trained autoencoder weights at " + (dir / kAutoencoderFile).string() +
                        "; run 'train autoencoder' first");
    const auto train = load_corpus(a.train, a.max_train);
    const auto test = a.test.empty() ? models::EncodedCorpus{} : load_corpus(a.test, 0);
    if (train.size() == 0) throw DataError("training set is empty");

    nn::TrainConfig cfg;
    cfg.epochs = a.epochs;
    cfg.batch_size = a.batch_size;
    cfg.adam.learning_rate = a.lr;
    cfg.adam.beta1 = a.beta1;
    cfg.adam.beta2 = a.beta2;

    nn::TrainResult<float> result;
    const char* file;
    if (a.model == "autoencoder") {
        cfg.seed = a.seed ? a.seed : models::kAutoencoderSeed;
        result = models::train_autoencoder(models::build_autoencoder(cfg.seed), train, test, cfg);
        file = kAutoencoderFile;
    } else if (a.model == "classifier") {
        cfg.seed = a.seed ? a.seed : models::kClassifierSeed;
        result = models::train_classifier(models::build_classifier(cfg.seed), train, test, cfg);
        file = kClassifierFile;
    } else {
        cfg.seed = a.seed ? a.seed : models::kEvaluatorSeed;
        const auto ae = load_model(dir, kAutoencoderFile);
        models::check_autoencoder(ae);
        result = models::train_evaluator(models::build_evaluator(cfg.seed, a.width), ae, train, test, cfg);
        file = kEvaluatorFile;
    }
    fs::create_directories(dir);
    nn::save_params(result.params, dir / file);
    const fs::path metrics = a.metrics.empty() ? dir / (a.model + "_metrics.csv") : fs::path(a.metrics);
    {
        std::ofstream out(metrics, std::ios::binary | std::ios::trunc);
        nn::write_metrics_csv(out, result.metrics);
    }
    nn::write_metrics_csv(std::cout, result.metrics);
    std::cerr << "wrote " << (dir / file).string() << " and " << metrics.string() << "\n";
    return kOk;
}

// ---- eval -------------------------------------------------------------------

int cmd_eval(const std::string& fen, const std::string& models_dir) {
    const auto board = board_from_arg(fen);
    const fs::path dir = models_dir;
    const auto ae = load_model(dir, kAutoencoderFile);
    const auto ev = load_model(dir, kEvaluatorFile);
    const search::NeuralEvaluator evaluator(ae, ev);
    const float value = search::static_eval(board, evaluator);
    std::printf("fen: %s\n", chess::serialize_fen(board).c_str());
    std::printf("cp: %d\n", models::denormalize(value));
    std::printf("value: %.6f\n", static_cast<double>(value));
    if (fs::exists(dir / kClassifierFile)) {
        const search::NeuralClassifier classifier(load_model(dir, kClassifierFile));
        const auto p = classifier.classify(board);
        std::printf("black_winning: %.4f\ndrawish: %.4f\nwhite_winning: %.4f\n", static_cast<double>(p[0]),
                    static_cast<double>(p[1]), static_cast<double>(p[2]));
    }
    return kOk;
}

// ---- uci / search construction --------------------------------------------

struct EngineArgs {
    std::string models = "models";
    int depth = 5;
    unsigned threads = 1;
    std::size_t hash_mb = 16;
    float prune_tau = 0.99f;
    int prune_depth = 2;
    bool classical = false;
    bool no_gate = false;
};

search::SearchConfig search_config(const EngineArgs& a) {
    search::SearchConfig c;
    c.max_depth = a.depth;
    c.threads = a.threads;
    c.tt_entries = a.hash_mb * 1024 * 1024 / 16;
    c.prune_tau = a.prune_tau;
    c.prune_max_depth = a.prune_depth;
    c.use_gate = !a.no_gate;
    c.validate();
    return c;
}

std::unique_ptr<search::SearchFacade> make_facade(const EngineArgs& a) {
    const auto cfg = search_config(a);
    if (a.classical)
        return std::make_unique<search::SearchFacade>(std::make_unique<search::ClassicalEvaluator>(), nullptr, cfg);
    const fs::path dir = a.models;
    auto ev = std::make_unique<search::NeuralEvaluator>(load_model(dir, kAutoencoderFile), load_model(dir, kEvaluatorFile));
    std::unique_ptr<search::PositionClassifier> cls;
    if (fs::exists(dir / kClassifierFile))
        cls = std::make_unique<search::NeuralClassifier>(load_model(dir, kClassifierFile));
    return std::make_unique<search::SearchFacade>(std::move(ev), std::move(cls), cfg);
}

int cmd_uci(const EngineArgs& a) {
    auto facade = make_facade(a);
    uci::server_loop(std::cin, std::cout, *facade);
    return kOk;
}

// ---- bench ------------------------------------------------------------------

struct AgreeArgs {
    EngineArgs engine;
    std::string positions;
    std::string ref_engine;
    std::vector<std::string> ref_args;
    std::vector<std::string> ref_options;
    bench::AgreementConfig config;
    std::string report = "agreement";
    int timeout_ms = 120000;
};

int cmd_bench_agree(AgreeArgs a) {
    check_file(a.positions);
    a.engine.depth = a.config.our_depth;
    const auto ec = engine_config(a.ref_engine, a.ref_args, a.ref_options, a.timeout_ms);
    std::ifstream in(a.positions);
    const auto fens = bench::read_fen_list(in);
    if (fens.empty()) throw DataError("no positions in " + a.positions);

    std::unique_ptr<search::Evaluator> ev;
    std::unique_ptr<search::PositionClassifier> cls;
    if (a.engine.classical) {
        ev = std::make_unique<search::ClassicalEvaluator>();
    } else {
        const fs::path dir = a.engine.models;
        ev = std::make_unique<search::NeuralEvaluator>(load_model(dir, kAutoencoderFile),
                                                       load_model(dir, kEvaluatorFile));
        if (fs::exists(dir / kClassifierFile))
            cls = std::make_unique<search::NeuralClassifier>(load_model(dir, kClassifierFile));
    }
    search::Searcher searcher(*ev, cls.get(), search_config(a.engine));
    const bench::MovePicker ours = [&](const chess::Board& b, int depth) {
        searcher.config().max_depth = depth;
        searcher.new_game();
        const auto r = searcher.search(b);
        return bench::OurChoice{r.bestmove.uci(), r.cp};
    };
    const auto records = bench::run_agreement(fens, ours, uci::uci_engine_factory(ec), a.config);
    bench::emit_report(a.report, records, a.config, fs::path(a.ref_engine).filename().string());
    std::cout << bench::summary_json(records, a.config, fs::path(a.ref_engine).filename().string());
    return kOk;
}

int cmd_bench_filtered(const std::string& models_dir, const std::string& test, const std::string& out) {
    const auto cls = load_model(models_dir, kClassifierFile);
    const auto corpus = load_corpus(test, 0);
    const auto acc = bench::run_filtered_accuracy(cls, corpus);
    const auto json = bench::filtered_json(acc);
    if (!out.empty()) std::ofstream(out, std::ios::binary | std::ios::trunc) << json;
    std::cout << json;
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Limited-lookahead chess engine: dataset building, model training, evaluation, search and UCI."};
    app.require_subcommand(1);

    DatasetArgs ds;
    auto* dataset_cmd = app.add_subcommand("dataset", "Build a labeled corpus from PGN games");
    dataset_cmd->add_option("--pgn", ds.pgn, "PGN input file (repeatable)")->required();
    dataset_cmd->add_option("--out", ds.out, "Output directory")->required();
    dataset_cmd->add_option("--engine", ds.engine, "UCI reference engine used for labels")->required();
    dataset_cmd->add_option("--engine-arg", ds.engine_args, "Argument passed to the engine (repeatable)");
    dataset_cmd->add_option("--engine-option", ds.engine_options, "UCI option Name=Value (repeatable)");
    dataset_cmd->add_option("--depth", ds.depth, "Label search depth")->check(CLI::Range(1, 60));
    dataset_cmd->add_option("--expand-fraction", ds.expand_fraction, "Fraction of samples expanded by a random move")
        ->check(CLI::Range(0.0, 1.0));
    dataset_cmd->add_option("--train-fraction", ds.train_fraction, "Fraction of samples in the training split")
        ->check(CLI::Range(0.0, 1.0));
    dataset_cmd->add_option("--seed", ds.seed, "Seed for expansion and split");
    dataset_cmd->add_option("--workers", ds.workers, "Engine processes used for labeling")->check(CLI::Range(1, 256));
    dataset_cmd->add_option("--max-positions", ds.max_positions, "Keep at most this many unique positions (0: all)");
    dataset_cmd->add_flag("--cache", ds.cache, "Also write packed feature caches");
    dataset_cmd->add_option("--timeout-ms", ds.timeout_ms, "Per-position engine timeout")->check(CLI::PositiveNumber);

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train one of the three networks");
    train_cmd->add_option("model", tr.model, "autoencoder, classifier or evaluator")
        ->required()
        ->check(CLI::IsMember({"autoencoder", "classifier", "evaluator"}));
    train_cmd->add_option("--train", tr.train, "Training samples (TSV)")->required();
    train_cmd->add_option("--test", tr.test, "Test samples (TSV) for per-epoch metrics");
    train_cmd->add_option("--models", tr.models, "Model directory");
    train_cmd->add_option("--metrics", tr.metrics, "Metrics CSV path (default <models>/<model>_metrics.csv)");
    train_cmd->add_option("--epochs", tr.epochs, "Epochs")->check(CLI::Range(1, 100000));
    train_cmd->add_option("--batch-size", tr.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
    train_cmd->add_option("--lr", tr.lr, "Adam learning rate")->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--beta1", tr.beta1, "Adam beta1")->check(CLI::Range(0.0, 1.0));
    train_cmd->add_option("--beta2", tr.beta2, "Adam beta2")->check(CLI::Range(0.0, 1.0));
    train_cmd->add_option("--seed", tr.seed, "Initialization and shuffling seed (0: model default)");
    train_cmd->add_option("--width", tr.width, "Evaluator hidden width")->check(CLI::Range(1, 65536));
    train_cmd->add_option("--max-train", tr.max_train, "Use at most this many training samples (0: all)");

    std::string eval_fen, eval_models = "models";
    auto* eval_cmd = app.add_subcommand("eval", "Static evaluation of one position");
    eval_cmd->add_option("fen", eval_fen, "FEN, or 'startpos'")->required();
    eval_cmd->add_option("--models", eval_models, "Model directory");

    EngineArgs ea;
    auto add_engine_flags = [](CLI::App* c, EngineArgs& e) {
        c->add_option("--models", e.models, "Model directory");
        c->add_option("--threads", e.threads, "Search threads")->check(CLI::Range(1, 64));
        c->add_option("--hash", e.hash_mb, "Transposition table size in MB")->check(CLI::Range(1, 4096));
        c->add_option("--prune-tau", e.prune_tau, "Classifier pruning threshold")->check(CLI::Range(0.0, 1.0));
        c->add_option("--prune-depth", e.prune_depth, "Deepest remaining depth the classifier may prune")
            ->check(CLI::Range(0, 60));
        c->add_flag("--no-gate", e.no_gate, "Disable classifier pruning");
        c->add_flag("--classical", e.classical, "Use the handcrafted evaluator instead of the networks");
    };
    auto* uci_cmd = app.add_subcommand("uci", "Run as a UCI engine on stdin/stdout");
    add_engine_flags(uci_cmd, ea);
    uci_cmd->add_option("--depth", ea.depth, "Default search depth")->check(CLI::Range(1, 60));

    auto* bench_cmd = app.add_subcommand("bench", "Benchmarks against a reference engine");
    bench_cmd->require_subcommand(1);
    AgreeArgs ag;
    auto* agree_cmd = bench_cmd->add_subcommand("agree", "Move agreement with a reference engine");
    agree_cmd->add_option("--positions", ag.positions, "FEN list, one per line")->required();
    agree_cmd->add_option("--ref-engine", ag.ref_engine, "UCI reference engine")->required();
    agree_cmd->add_option("--ref-arg", ag.ref_args, "Argument passed to the reference engine (repeatable)");
    agree_cmd->add_option("--ref-option", ag.ref_options, "UCI option Name=Value (repeatable)");
    agree_cmd->add_option("--our-depth", ag.config.our_depth, "Our search depth")->check(CLI::Range(1, 60));
    agree_cmd->add_option("--ref-depth", ag.config.ref_depth, "Reference depth")->check(CLI::Range(1, 99));
    agree_cmd->add_option("--eps-cp", ag.config.eps_cp, "Equal-strength tolerance in centipawns")
        ->check(CLI::NonNegativeNumber);
    agree_cmd->add_option("--child-depth-offset", ag.config.child_depth_offset,
                          "Children are analyzed this many plies shallower")
        ->check(CLI::Range(0, 10));
    agree_cmd->add_option("--workers", ag.config.workers, "Reference engine processes")->check(CLI::Range(1, 256));
    agree_cmd->add_option("--report", ag.report, "Report path prefix (.json and .tsv are appended)");
    agree_cmd->add_option("--timeout-ms", ag.timeout_ms, "Per-analysis timeout")->check(CLI::PositiveNumber);
    add_engine_flags(agree_cmd, ag.engine);

    std::string fl_models = "models", fl_test, fl_out;
    auto* filtered_cmd = bench_cmd->add_subcommand("filtered", "Classifier accuracy with boundary filtering");
    filtered_cmd->add_option("--models", fl_models, "Model directory");
    filtered_cmd->add_option("--test", fl_test, "Labeled test samples (TSV)")->required();
    filtered_cmd->add_option("--out", fl_out, "Write the JSON result here too");

    std::string perft_fen = "startpos";
    int perft_depth = 5;
    auto* perft_cmd = app.add_subcommand("perft", "Count leaf nodes of the legal move tree");
    perft_cmd->add_option("--fen", perft_fen, "FEN, or 'startpos'");
    perft_cmd->add_option("--depth", perft_depth, "Depth")->check(CLI::Range(0, 10));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*dataset_cmd) return cmd_dataset(ds);
        if (*train_cmd) return cmd_train(tr);
        if (*eval_cmd) return cmd_eval(eval_fen, eval_models);
        if (*uci_cmd) return cmd_uci(ea);
        if (*agree_cmd) return cmd_bench_agree(ag);
        if (*filtered_cmd) return cmd_bench_filtered(fl_models, fl_test, fl_out);
        if (*perft_cmd) {
            const auto board = board_from_arg(perft_fen);
            std::cout << chess::perft(board, perft_depth) << "\n";
            return kOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const uci::EngineError& e) {
        std::cerr << "engine error: " << e.what() << "\n";
        return kEngine;
    } catch (const uci::ProcessError& e) {
        std::cerr << "engine error: " << e.what() << "\n";
        return kEngine;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}
