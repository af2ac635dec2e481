// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Pass criterion numbers as arguments to
// run a subset, e.g. `neglr_acceptance 1 2 5`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "neglr/csv.hpp"
#include "neglr/lr_channel.hpp"
#include "neglr/plearn.hpp"
#include "neglr/qlearn.hpp"
#include "neglr/rated_loss.hpp"
#include "neglr/regression_lab.hpp"
#include "neglr_cli/cli.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace neglr;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string num(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// ------------------------------------------------------------- criterion 1

constexpr double kGradTol = 1e-5;

Verdict gradient_correctness() {
    Rng rng(101);
    double worst_net = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto net = testing::random_net(rng);
        const auto x = testing::random_vector(rng, net.input_dim());
        const auto g = testing::random_vector(rng, net.output_dim());
        const auto analytic = testing::flatten(net.backward(net.forward(x).trace, g));
        const auto numeric = testing::fd_gradient(
            net, [&](const Mlp& m) { return testing::dot(testing::reference_forward(m, x), g); }, 1e-6);
        for (std::size_t k = 0; k < analytic.size(); ++k)
            worst_net = std::max(worst_net, testing::rel_err(analytic[k], numeric[k]));
    }

    const LossParams params{};
    double worst_loss = 0.0;
    int instances = 0;
    while (instances < 100) {
        const std::size_t n = 1 + rng.below(4);
        const auto pred = testing::random_vector(rng, n, -2, 2);
        const auto target = testing::random_vector(rng, n, -2, 2);
        const double r = rng.uniform(-1, 1);
        bool usable = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = pred[i] - target[i];
            // singularity band and clipped region are excluded
            if (std::abs(u) <= 10 * params.sing_epsilon || (r < 0 && std::abs(r / u) >= params.grad_clip))
                usable = false;
        }
        if (!usable) continue;
        ++instances;
        const auto grad = rated_loss_grad(pred, target, r, params);
        for (std::size_t i = 0; i < n; ++i) {
            auto up = pred, down = pred;
            up[i] += 1e-6;
            down[i] -= 1e-6;
            const double fd = (rated_loss(up, target, r, params) - rated_loss(down, target, r, params)) / 2e-6;
            worst_loss = std::max(worst_loss, testing::rel_err(grad[i], fd));
        }
    }
    return {worst_net < kGradTol && worst_loss < kGradTol,
            "worst relative error: backward " + num(worst_net) + ", rated_loss_grad " + num(worst_loss) +
                " (limit 1e-5)"};
}

// ------------------------------------------------------------- criterion 2

Verdict normalization_invariants() {
    Rng rng(202);
    int violations = 0;
    double worst_shift = 0.0, worst_mean = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> d(1 + rng.below(40));
        for (auto& v : d) v = rng.uniform(0.0, 4.0);
        if (trial % 10 == 0) std::fill(d.begin(), d.end(), d.front());
        const bool degenerate = std::all_of(d.begin(), d.end(), [&](double v) { return v == d.front(); });
        const auto unit = factors_unit(d);
        const auto sgn = factors_signed(d);

        double peak = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (unit[i] < 0.0 || unit[i] > 1.0 || sgn[i] < -1.0 || sgn[i] > 1.0) ++violations;
            peak = std::max(peak, std::abs(sgn[i]));
            sum += sgn[i];
            for (std::size_t j = 0; j < d.size(); ++j)
                if (d[i] < d[j] && (unit[i] < unit[j] || sgn[i] < sgn[j])) ++violations;
        }
        if (!degenerate && peak != 1.0) ++violations;
        worst_mean = std::max(worst_mean, std::abs(sum / static_cast<double>(d.size())));

        const double a = rng.uniform(0.01, 100.0), c = rng.uniform(0.0, 10.0);
        std::vector<double> moved(d);
        for (auto& v : moved) v = a * v + c;
        const auto unit2 = factors_unit(moved);
        const auto sgn2 = factors_signed(moved);
        for (std::size_t i = 0; i < d.size(); ++i)
            worst_shift = std::max({worst_shift, std::abs(unit2[i] - unit[i]), std::abs(sgn2[i] - sgn[i])});
    }
    return {violations == 0 && worst_mean < 1e-12 && worst_shift < 1e-12,
            std::to_string(violations) + " range/extreme/order violations, max |mean factor| " + num(worst_mean) +
                ", max shift/scale drift " + num(worst_shift) + " (limit 1e-12)"};
}

// --------------------------------------------------------- criteria 3 and 4

constexpr std::uint64_t kRegressionSeed = 1;

struct RegressionResults {
    double raw = 0, unit = 0, signed_plain = 0, signed_inverted = 0, baseline = 0;
    double seconds_channel = 0, seconds_baseline = 0;
};

const RegressionResults& regression_results() {
    static const RegressionResults results = [] {
        RegressionResults r;
        TrainConfig config;  // defaults: mu 0.01, 5000 epochs
        config.seed = kRegressionSeed;
        const auto data = gen_sine_dataset(40, kRegressionSeed);
        auto run = [&](Scheme s, bool invert) {
            auto net = Mlp::init({1, 128, 1}, kRegressionSeed);
            return train_lr_channel(net, data, s, {invert, true}, config).epoch_mse.back();
        };
        auto t0 = std::chrono::steady_clock::now();
        r.raw = run(Scheme::RawDistance, false);
        r.unit = run(Scheme::UnitInterval, false);
        r.signed_plain = run(Scheme::SignedUnit, false);
        r.signed_inverted = run(Scheme::SignedUnit, true);
        auto t1 = std::chrono::steady_clock::now();
        auto net = Mlp::init({1, 128, 1}, kRegressionSeed);
        r.baseline = train_baseline(net, data, config).epoch_mse.back();
        auto t2 = std::chrono::steady_clock::now();
        r.seconds_channel = std::chrono::duration<double>(t1 - t0).count();
        r.seconds_baseline = std::chrono::duration<double>(t2 - t1).count();
        return r;
    }();
    return results;
}

Verdict figure_progression() {
    const auto& r = regression_results();
    const bool ordered = r.signed_inverted < r.signed_plain && r.signed_plain < r.unit && r.unit < r.raw;
    const bool close = r.signed_inverted <= 0.05;
    return {ordered && close && r.seconds_channel < 120.0,
            "final MSE signed+invert " + num(r.signed_inverted) + ", signed " + num(r.signed_plain) + ", unit " +
                num(r.unit) + ", raw " + num(r.raw) + "; ordering " + (ordered ? "holds" : "violated") +
                ", signed+invert <= 0.05 " + (close ? "yes" : "no") + " (seed " + std::to_string(kRegressionSeed) +
                ", 5000 epochs, resampled targets)"};
}

Verdict baseline_proximity() {
    const auto& r = regression_results();
    const double ratio = r.signed_inverted / r.baseline;
    return {ratio <= 3.0 && r.seconds_baseline + r.seconds_channel / 4 < 60.0,
            "MSE signed+invert " + num(r.signed_inverted) + " vs baseline " + num(r.baseline) + ", ratio " +
                num(ratio) + " (limit 3)"};
}

// ------------------------------------------------------------- criterion 5

Verdict return_oracle() {
    Rng rng(505);
    double worst = 0.0;
    int leaks = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto log = testing::random_log(rng);
        const double gamma = rng.uniform01();
        const auto got = propagate_rewards(log, gamma, true);
        const auto want = testing::brute_force_returns(log, gamma);
        for (std::size_t i = 0; i < log.size(); ++i) worst = std::max(worst, std::abs(got[i].ret - want[i]));

        auto muted = log;
        const int victim = log[rng.below(log.size())].episode_id;
        for (auto& e : muted)
            if (e.episode_id == victim) e.reward = 0.0;
        const auto after = propagate_rewards(muted, gamma, true);
        for (std::size_t i = 0; i < log.size(); ++i)
            if (log[i].episode_id != victim && after[i].ret != got[i].ret) ++leaks;
    }
    return {worst < 1e-12 && leaks == 0,
            "max |propagated - brute force| " + num(worst) + " (limit 1e-12), cross-episode leaks " +
                std::to_string(leaks)};
}

// ---------------------------------------------------------- criteria 6, 7

constexpr std::size_t kGameBudget = 1000;
constexpr double kSuccess = 0.9;

RlConfig plearn_config(std::uint64_t seed) {
    RlConfig c;
    c.exploration_games = kGameBudget;
    c.eval_episodes = 100;
    c.seed = seed;
    return c;
}

QConfig qlearn_config(std::uint64_t seed) {
    QConfig c;
    c.games = kGameBudget;
    c.eval_episodes = 100;
    c.seed = seed;
    return c;
}

Verdict plearn_vs_qlearn() {
    const auto world = make_layout(LayoutKind::Cliff4x12);
    int p_ok = 0, q_ok = 0;
    std::string p_rates, q_rates;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const double p = run_p_learning(world, plearn_config(seed)).metrics.back().success_rate;
        const double q = run_q_learning(world, qlearn_config(seed)).second.metrics.back().success_rate;
        p_ok += p >= kSuccess;
        q_ok += q >= kSuccess;
        p_rates += (seed ? " " : "") + num(p, 3);
        q_rates += (seed ? " " : "") + num(q, 3);
    }
    return {p_ok >= 4 && q_ok >= 4,
            "greedy success over 5 seeds, " + std::to_string(kGameBudget) + " games each: p-learning [" + p_rates +
                "] (" + std::to_string(p_ok) + "/5 >= 0.9), q-learning [" + q_rates + "] (" + std::to_string(q_ok) +
                "/5 >= 0.9); need 4/5 each"};
}

Verdict filter_harmlessness() {
    const auto world = make_layout(LayoutKind::Cliff4x12);
    const auto unfiltered = run_p_learning(world, plearn_config(0));

    // Smallest epsilon that drops at least 20% of this run's examples.
    std::vector<double> returns;
    for (const auto& e : unfiltered.experiences) returns.push_back(e.ret);
    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= static_cast<double>(returns.size());
    std::vector<double> dev;
    for (double r : returns) dev.push_back(std::abs(r - mean));
    std::sort(dev.begin(), dev.end());
    const std::size_t need = (returns.size() + 4) / 5;
    const double eps = std::nextafter(dev[need - 1], INFINITY);

    auto config = plearn_config(0);
    config.filter_epsilon = eps;
    const auto filtered = run_p_learning(world, config);
    const double dropped = 1.0 - static_cast<double>(filtered.examples_kept) / static_cast<double>(returns.size());
    const std::size_t near_mean = static_cast<std::size_t>(std::count_if(dev.begin(), dev.end(), [](double d) {
        return d < 0.05;
    }));
    const double success = filtered.metrics.back().success_rate;
    return {dropped >= 0.2 && success >= kSuccess,
            "filter_epsilon " + num(eps) + " dropped " + num(100 * dropped, 3) + "% of " +
                std::to_string(returns.size()) + " examples (" + std::to_string(near_mean) +
                " within 0.05 of the mean); success " + num(success, 3) + " (unfiltered " +
                num(unfiltered.metrics.back().success_rate, 3) + "), need >= 0.9"};
}

// ------------------------------------------------------------- criterion 8

int cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    return cli::run(args, out, err);
}

Verdict determinism() {
    const fs::path root = fs::temp_directory_path() / ("neglr_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const std::vector<std::vector<std::string>> commands{
        {"regress", "--scheme", "signed", "--invert-gradient", "--resample", "--epochs", "200", "--seed", "7"},
        {"regress", "--scheme", "unit", "--epochs", "0", "--seed", "8"},
        {"figures", "--epochs", "50", "--seed", "3"},
        {"rl", "--algo", "plearn", "--games", "200", "--rounds", "2", "--filter-eps", "0.05", "--seed", "4"},
        {"rl", "--algo", "qlearn", "--games", "200", "--rounds", "2", "--layout", "checkers8", "--seed", "4"},
    };
    int compared = 0, mismatched = 0, failed = 0;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const fs::path first = root / ("run" + std::to_string(i));
        const fs::path second = root / ("replay" + std::to_string(i));
        auto args = commands[i];
        args.insert(args.end(), {"--out", first.string()});
        if (cli(args) != 0 ||
            cli({"replay", "--manifest", (first / "manifest.json").string(), "--out", second.string()}) != 0) {
            ++failed;
            continue;
        }
        for (const auto& entry : fs::directory_iterator(first)) {
            if (entry.path().extension() != ".csv") continue;
            ++compared;
            const auto other = second / entry.path().filename();
            if (!fs::exists(other) || read_text_file(entry.path()) != read_text_file(other)) ++mismatched;
        }
    }
    // plot has no manifest; its output must still be a pure function of its input
    const auto csv = (root / "run0" / "fig4_curve.csv").string();
    const bool plots_equal = failed == 0 && cli({"plot", "--in", csv, "--out", (root / "a.svg").string()}) == 0 &&
                             cli({"plot", "--in", csv, "--out", (root / "b.svg").string()}) == 0 &&
                             read_text_file(root / "a.svg") == read_text_file(root / "b.svg");
    fs::remove_all(root);
    return {failed == 0 && mismatched == 0 && compared > 0 && plots_equal,
            std::to_string(commands.size()) + " commands replayed from their manifests, " + std::to_string(compared) +
                " CSV files compared, " + std::to_string(mismatched) + " differ, " + std::to_string(failed) +
                " runs failed; plot output " + (plots_equal ? "identical" : "differs")};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "gradient correctness", gradient_correctness},
        {2, "normalization invariants", normalization_invariants},
        {3, "figure progression", figure_progression},
        {4, "baseline proximity", baseline_proximity},
        {5, "return oracle equivalence", return_oracle},
        {6, "p-learning vs q-learning", plearn_vs_qlearn},
        {7, "filter harmlessness", filter_harmlessness},
        {8, "determinism", determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.contains(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += !v.pass;
        std::printf("[%s] %d %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
