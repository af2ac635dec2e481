#include "neglr_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "neglr/csv.hpp"
#include "neglr/errors.hpp"
#include "neglr/gridworld.hpp"
#include "neglr/lr_channel.hpp"
#include "neglr/plearn.hpp"
#include "neglr/qlearn.hpp"
#include "neglr/regression_lab.hpp"
#include "neglr/svg_plot.hpp"

namespace neglr::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kOutEnv = "NEG_LR_LAB_OUT";
constexpr std::size_t kSineSamples = 40;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

fs::path resolve_out(const std::string& flag) {
    std::string dir = flag;
    if (dir.empty()) {
        if (const char* env = std::getenv(kOutEnv)) dir = env;
    }
    if (dir.empty()) throw UsageError(std::string("--out is required (or set ") + kOutEnv + ")");
    fs::create_directories(dir);
    return dir;
}

/// Collects the files written by one command and emits manifest.json last.
class RunRecorder {
public:
    RunRecorder(const std::vector<std::string>& args, fs::path dir)
        : args_(args), dir_(std::move(dir)), started_(utc_now()) {}

    const fs::path& dir() const { return dir_; }

    void write(const std::string& name, std::string_view contents) {
        write_text_file(dir_ / name, contents);
        outputs_.push_back(name);
    }

    void finish(json config, std::uint64_t seed) {
        json doc;
        doc["tool"] = "neglr";
        doc["command"] = args_;
        doc["config"] = std::move(config);
        doc["seed"] = seed;
        doc["started_at"] = started_;
        doc["finished_at"] = utc_now();
        doc["outputs"] = outputs_;
        write_text_file(dir_ / "manifest.json", doc.dump(2) + "\n");
    }

    std::size_t output_count() const { return outputs_.size() + 1; }

private:
    std::vector<std::string> args_;
    fs::path dir_;
    std::string started_;
    std::vector<std::string> outputs_;
};

// ---------------------------------------------------------------- regression

struct RegressionSetup {
    std::optional<Scheme> scheme;  ///< empty for the conventional baseline
    bool invert = false;
    bool resample = false;
};

int figure_number(const RegressionSetup& s) {
    if (!s.scheme) return 5;
    switch (*s.scheme) {
        case Scheme::RawDistance: return 1;
        case Scheme::UnitInterval: return 2;
        case Scheme::SignedUnit: return s.invert ? 4 : 3;
    }
    return 0;
}

std::string label_of(const RegressionSetup& s) {
    if (!s.scheme) return "baseline";
    std::string label(to_string(*s.scheme));
    if (s.invert) label += "+invert";
    return label;
}

struct RegressionRun {
    RegressionSetup setup;
    SineDataset data;
    Mlp net;
    double initial_mse = 0.0;
    TrainingHistory history;
};

RegressionRun run_regression(const RegressionSetup& setup, const TrainConfig& config, std::size_t hidden) {
    const std::size_t layers[] = {1, hidden, 1};
    RegressionRun run{setup, gen_sine_dataset(kSineSamples, config.seed), Mlp::init(layers, config.seed),
                      0.0, {}};
    const auto xs = run.data.xs();
    run.initial_mse = evaluate_vs_sine(run.net, xs).mse;
    if (setup.scheme)
        run.history = train_lr_channel(run.net, run.data, *setup.scheme, {setup.invert, setup.resample}, config);
    else
        run.history = train_baseline(run.net, run.data, config);
    return run;
}

double final_mse(const RegressionRun& run) {
    return run.history.epoch_mse.empty() ? run.initial_mse : run.history.epoch_mse.back();
}

/// figN.csv (training examples), figN_curve.csv, figN_history.csv and an
/// optional figN.svg. Returns the dense-grid MSE.
double write_regression_outputs(RunRecorder& rec, const RegressionRun& run, const std::string& stem,
                                bool svg) {
    CsvWriter points({"x", "prediction", "sin_x", "z_raw", "factor"});
    for (const auto& ex : run.history.last_batch) {
        const double x = ex.x.at(0);
        points.add_row({format_double(x), format_double(run.net.predict(ex.x).at(0)),
                        format_double(std::sin(x)), format_double(ex.z.at(0)), format_double(ex.factor)});
    }
    rec.write(stem + ".csv", points.str());

    const auto grid = sine_eval_grid();
    const auto report = evaluate_vs_sine(run.net, grid);
    CsvWriter curve({"x", "prediction", "sin_x"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        curve.add_row({format_double(grid[i]), format_double(report.predictions[i]),
                       format_double(report.targets[i])});
    rec.write(stem + "_curve.csv", curve.str());

    CsvWriter history({"epoch", "mse"});
    history.add_row({"0", format_double(run.initial_mse)});
    for (std::size_t e = 0; e < run.history.epoch_mse.size(); ++e)
        history.add_row({format_int(static_cast<std::int64_t>(e + 1)), format_double(run.history.epoch_mse[e])});
    rec.write(stem + "_history.csv", history.str());

    if (svg) rec.write(stem + ".svg", render_svg(parse_csv(curve.str()), {.title = stem + " " + label_of(run.setup)}));
    return report.mse;
}

json train_config_json(const TrainConfig& c, std::size_t hidden) {
    return {{"global_lr", c.global_lr}, {"epochs", c.epochs},           {"seed", c.seed},
            {"grad_clip", c.grad_clip}, {"sing_epsilon", c.sing_epsilon}, {"hidden", hidden},
            {"samples", kSineSamples}};
}

struct RegressOptions {
    std::string scheme;
    bool invert = false;
    bool resample = false;
    std::size_t epochs = TrainConfig{}.epochs;
    std::uint64_t seed = 0;
    std::size_t hidden = 128;
    double mu = TrainConfig{}.global_lr;
    std::string out;
    bool svg = false;
};

int cmd_regress(const RegressOptions& o, const std::vector<std::string>& args, std::ostream& out) {
    RegressionSetup setup;
    if (o.scheme != "baseline") setup.scheme = parse_scheme(o.scheme);
    if (o.invert && setup.scheme != Scheme::SignedUnit)
        throw UsageError("--invert-gradient requires --scheme signed");
    setup.invert = o.invert;
    setup.resample = o.resample;

    TrainConfig config;
    config.epochs = o.epochs;
    config.seed = o.seed;
    config.global_lr = o.mu;
    try {
        validate(config);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    RunRecorder rec(args, resolve_out(o.out));

    const auto run = run_regression(setup, config, o.hidden);
    const std::string stem = "fig" + std::to_string(figure_number(setup));
    const double grid_mse = write_regression_outputs(rec, run, stem, o.svg);
    rec.write("model.json", run.net.to_json() + "\n");

    json cfg = train_config_json(config, o.hidden);
    cfg["scheme"] = label_of(setup);
    cfg["invert_gradient"] = setup.invert;
    cfg["resample"] = setup.resample;
    rec.finish(std::move(cfg), config.seed);
    out << stem << " " << label_of(setup) << ": train mse " << format_double(final_mse(run)) << ", grid mse "
        << format_double(grid_mse) << " (" << rec.output_count() << " files in " << rec.dir().string() << ")\n";
    return kOk;
}

struct FiguresOptions {
    std::size_t epochs = TrainConfig{}.epochs;
    std::uint64_t seed = 0;
    std::size_t hidden = 128;
    double mu = TrainConfig{}.global_lr;
    bool resample = true;
    std::string out;
    bool svg = false;
};

int cmd_figures(const FiguresOptions& o, const std::vector<std::string>& args, std::ostream& out) {
    TrainConfig config;
    config.epochs = o.epochs;
    config.seed = o.seed;
    config.global_lr = o.mu;
    try {
        validate(config);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    RunRecorder rec(args, resolve_out(o.out));

    const RegressionSetup setups[] = {
        {Scheme::RawDistance, false, o.resample},
        {Scheme::UnitInterval, false, o.resample},
        {Scheme::SignedUnit, false, o.resample},
        {Scheme::SignedUnit, true, o.resample},
        {std::nullopt, false, false},
    };
    CsvWriter summary({"figure", "config", "final_mse", "grid_mse"});
    for (const auto& setup : setups) {
        const auto run = run_regression(setup, config, o.hidden);
        const std::string stem = "fig" + std::to_string(figure_number(setup));
        const double grid_mse = write_regression_outputs(rec, run, stem, o.svg);
        rec.write(stem + "_model.json", run.net.to_json() + "\n");
        summary.add_row({stem, label_of(setup), format_double(final_mse(run)), format_double(grid_mse)});
        out << stem << " " << label_of(setup) << ": train mse " << format_double(final_mse(run)) << "\n";
    }
    rec.write("summary.csv", summary.str());

    json cfg = train_config_json(config, o.hidden);
    cfg["resample"] = o.resample;
    rec.finish(std::move(cfg), config.seed);
    return kOk;
}

// ---------------------------------------------------------------------- rl

struct RlOptions {
    std::string algo;
    std::string layout = "cliff";
    std::string layout_file;
    std::size_t games = RlConfig{}.exploration_games;
    std::size_t rounds = 1;
    double gamma = RlConfig{}.discount;
    double filter_eps = 0.0;
    std::uint64_t seed = 0;
    std::size_t epochs = RlConfig{}.train_epochs;
    double mu = RlConfig{}.global_lr;
    double alpha = QConfig{}.alpha;
    double epsilon = QConfig{}.epsilon_greedy;
    bool no_propagate_negative = false;
    std::size_t eval_episodes = 100;
    std::size_t hidden = 128;
    std::string out;
    bool svg = false;
};

GridWorld load_world(const RlOptions& o) {
    if (o.layout == "cliff") return make_layout(LayoutKind::Cliff4x12);
    if (o.layout == "checkers8") return make_layout(LayoutKind::Checkers8);
    if (o.layout_file.empty()) throw UsageError("--layout file requires --layout-file");
    return parse_layout(read_text_file(o.layout_file));
}

std::string metrics_csv(const std::vector<RoundMetrics>& metrics) {
    CsvWriter csv({"round", "games", "success_rate", "avg_steps"});
    for (const auto& m : metrics)
        csv.add_row({format_int(static_cast<std::int64_t>(m.round)), format_int(static_cast<std::int64_t>(m.games)),
                     format_double(m.success_rate), format_double(m.avg_steps)});
    return csv.str();
}

std::string experience_csv(const std::vector<Experience>& exps, const std::vector<double>& factors) {
    CsvWriter csv({"episode_id", "t", "state_index", "action", "raw_reward", "return", "factor"});
    for (std::size_t i = 0; i < exps.size(); ++i) {
        const auto& e = exps[i];
        csv.add_row({format_int(e.episode_id), format_int(e.t), format_int(static_cast<std::int64_t>(e.state_index)),
                     format_int(e.action), format_double(e.reward), format_double(e.ret),
                     format_double(factors.at(i))});
    }
    return csv.str();
}

int cmd_rl(const RlOptions& o, const std::vector<std::string>& args, std::ostream& out) {
    if (o.rounds == 0) throw UsageError("--rounds must be positive");
    const GridWorld world = load_world(o);
    RunRecorder rec(args, resolve_out(o.out));

    json cfg{{"algo", o.algo},   {"layout", o.layout}, {"games", o.games},
             {"rounds", o.rounds}, {"discount", o.gamma}, {"eval_episodes", o.eval_episodes},
             {"hidden", o.hidden}, {"seed", o.seed}};
    if (!o.layout_file.empty()) cfg["layout_file"] = o.layout_file;

    std::vector<RoundMetrics> metrics;
    std::vector<Experience> exps;
    std::vector<double> factors;
    std::string model;
    if (o.algo == "plearn") {
        if (o.games % o.rounds != 0) throw UsageError("--games must be a multiple of --rounds for plearn");
        RlConfig c;
        c.discount = o.gamma;
        c.exploration_games = o.games / o.rounds;
        c.rounds = o.rounds;
        c.train_epochs = o.epochs;
        c.global_lr = o.mu;
        c.filter_epsilon = o.filter_eps;
        c.seed = o.seed;
        c.propagate_negative = !o.no_propagate_negative;
        c.hidden = o.hidden;
        c.eval_episodes = o.eval_episodes;
        auto result = run_p_learning(world, c);
        metrics = std::move(result.metrics);
        exps = std::move(result.experiences);
        factors = std::move(result.factors);
        model = result.policy.to_json();
        cfg["train_epochs"] = c.train_epochs;
        cfg["global_lr"] = c.global_lr;
        cfg["filter_epsilon"] = c.filter_epsilon;
        cfg["propagate_negative"] = c.propagate_negative;
        cfg["sing_epsilon"] = c.sing_epsilon;
        cfg["grad_clip"] = c.grad_clip;
        cfg["examples_kept"] = result.examples_kept;
    } else {
        QConfig c;
        c.alpha = o.alpha;
        c.discount = o.gamma;
        c.epsilon_greedy = o.epsilon;
        c.games = o.games;
        c.rounds = o.rounds;
        c.seed = o.seed;
        c.hidden = o.hidden;
        c.eval_episodes = o.eval_episodes;
        auto [net, result] = run_q_learning(world, c);
        metrics = std::move(result.metrics);
        // The log carries the returns and factors a p-learner would derive
        // from the same transitions.
        exps = propagate_rewards(result.experiences, c.discount, true);
        if (!exps.empty()) {
            std::vector<double> returns;
            for (const auto& e : exps) returns.push_back(e.ret);
            factors = center_and_scale(returns);
        }
        model = net.to_json();
        cfg["alpha"] = c.alpha;
        cfg["epsilon_greedy"] = c.epsilon_greedy;
        cfg["grad_clip"] = c.grad_clip;
    }

    rec.write("layout.txt", render_layout(world));
    const std::string metrics_text = metrics_csv(metrics);
    rec.write("metrics.csv", metrics_text);
    rec.write("experiences.csv", experience_csv(exps, factors));
    rec.write("model.json", model + "\n");
    if (o.svg) {
        auto table = parse_csv(metrics_text);
        CsvTable success{{"games", "success_rate"}, {}};
        for (const auto& row : table.rows) success.rows.push_back({row[1], row[2]});
        rec.write("metrics.svg", render_svg(success, {.title = o.algo + " greedy success"}));
    }
    rec.finish(std::move(cfg), o.seed);

    const auto& last = metrics.back();
    out << o.algo << " on " << o.layout << ": success_rate " << format_double(last.success_rate)
        << " after " << last.games << " games\n";
    return kOk;
}

// ------------------------------------------------------------------ plot etc

int cmd_plot(const std::string& in, const std::string& out_path, const std::string& title, std::ostream& out) {
    const auto table = read_csv(in);
    const auto svg = render_svg(table, {.title = title});
    const fs::path dest(out_path);
    if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
    write_text_file(dest, svg);
    out << "wrote " << dest.string() << " (" << table.header.size() - 1 << " series)\n";
    return kOk;
}

int cmd_replay(const std::string& manifest, const std::string& out_override, std::ostream& out,
               std::ostream& err) {
    json doc;
    try {
        doc = json::parse(read_text_file(manifest));
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }
    if (!doc.contains("command") || !doc["command"].is_array())
        throw ParseError("manifest has no command array");
    auto command = doc["command"].get<std::vector<std::string>>();
    if (command.empty() || command.front() == "replay") throw ParseError("manifest command is not replayable");

    if (!out_override.empty()) {
        std::vector<std::string> kept;
        for (std::size_t i = 0; i < command.size(); ++i) {
            if (command[i] == "--out") {
                ++i;
                continue;
            }
            if (command[i].rfind("--out=", 0) == 0) continue;
            kept.push_back(command[i]);
        }
        kept.push_back("--out");
        kept.push_back(out_override);
        command = std::move(kept);
    }
    return run(command, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Learning-rate channel experiments: sine regression and grid-world policy learning", "neglr"};
    app.require_subcommand(1);

    RegressOptions ro;
    auto* regress = app.add_subcommand("regress", "Fit the sine task with one learning-rate scheme");
    regress->add_option("--scheme", ro.scheme, "raw | unit | signed | baseline")
        ->required()
        ->check(CLI::IsMember({"raw", "unit", "signed", "baseline"}));
    regress->add_flag("--invert-gradient", ro.invert, "Repel negative-rate examples with the log loss");
    regress->add_flag("--resample", ro.resample, "Redraw every target each epoch");
    regress->add_option("--epochs", ro.epochs, "Training epochs")->capture_default_str();
    regress->add_option("--seed", ro.seed, "Seed for data, init and shuffling")->capture_default_str();
    regress->add_option("--hidden", ro.hidden, "Hidden units")->capture_default_str()->check(CLI::PositiveNumber);
    regress->add_option("--mu", ro.mu, "Global learning rate")->capture_default_str();
    regress->add_option("--out", ro.out, "Output directory (default $NEG_LR_LAB_OUT)");
    regress->add_flag("--svg", ro.svg, "Also render the fitted curve as SVG");

    FiguresOptions fo;
    auto* figures = app.add_subcommand("figures", "Run all five regression configurations with one seed");
    figures->add_option("--epochs", fo.epochs, "Training epochs per configuration")->capture_default_str();
    figures->add_option("--seed", fo.seed, "Shared seed")->capture_default_str();
    figures->add_option("--hidden", fo.hidden, "Hidden units")->capture_default_str()->check(CLI::PositiveNumber);
    figures->add_option("--mu", fo.mu, "Global learning rate")->capture_default_str();
    figures->add_flag("--resample,!--no-resample", fo.resample, "Redraw targets each epoch (default on)");
    figures->add_option("--out", fo.out, "Output directory (default $NEG_LR_LAB_OUT)");
    figures->add_flag("--svg", fo.svg, "Also render every curve as SVG");

    RlOptions rl;
    auto* rlc = app.add_subcommand("rl", "Train and evaluate a grid-world learner");
    rlc->add_option("--algo", rl.algo, "plearn | qlearn")->required()->check(CLI::IsMember({"plearn", "qlearn"}));
    rlc->add_option("--layout", rl.layout, "cliff | checkers8 | file")
        ->capture_default_str()
        ->check(CLI::IsMember({"cliff", "checkers8", "file"}));
    rlc->add_option("--layout-file", rl.layout_file, "ASCII map for --layout file")->check(CLI::ExistingFile);
    rlc->add_option("--games", rl.games, "Total game budget")->capture_default_str();
    rlc->add_option("--rounds", rl.rounds, "Collect/train rounds; metrics after each")->capture_default_str();
    rlc->add_option("--gamma", rl.gamma, "Discount factor")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    rlc->add_option("--filter-eps", rl.filter_eps, "Drop examples whose return is this close to the mean")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    rlc->add_option("--seed", rl.seed, "Seed")->capture_default_str();
    rlc->add_option("--epochs", rl.epochs, "Policy training epochs (plearn)")->capture_default_str();
    rlc->add_option("--mu", rl.mu, "Global learning rate (plearn)")->capture_default_str();
    rlc->add_option("--alpha", rl.alpha, "TD step size (qlearn)")->capture_default_str();
    rlc->add_option("--epsilon", rl.epsilon, "Exploration probability (qlearn)")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    rlc->add_flag("--no-propagate-negative", rl.no_propagate_negative, "Only positive rewards flow back (plearn)");
    rlc->add_option("--eval-episodes", rl.eval_episodes, "Greedy evaluation episodes")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    rlc->add_option("--hidden", rl.hidden, "Hidden units")->capture_default_str()->check(CLI::PositiveNumber);
    rlc->add_option("--out", rl.out, "Output directory (default $NEG_LR_LAB_OUT)");
    rlc->add_flag("--svg", rl.svg, "Also plot success rate against games");

    std::string plot_in, plot_out, plot_title;
    auto* plot = app.add_subcommand("plot", "Render a CSV (first column x) as an SVG line chart");
    plot->add_option("--in", plot_in, "Input CSV")->required();
    plot->add_option("--out", plot_out, "Output SVG")->required();
    plot->add_option("--title", plot_title, "Chart title");

    std::string manifest, replay_out;
    auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay->add_option("--manifest", manifest, "manifest.json of an earlier run")->required();
    replay->add_option("--out", replay_out, "Write to this directory instead of the recorded one");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("neglr");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (regress->parsed()) return cmd_regress(ro, args, out);
        if (figures->parsed()) return cmd_figures(fo, args, out);
        if (rlc->parsed()) return cmd_rl(rl, args, out);
        if (plot->parsed()) return cmd_plot(plot_in, plot_out, plot_title, out);
        if (replay->parsed()) return cmd_replay(manifest, replay_out, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kUsageError;
}

}  // namespace neglr::cli
