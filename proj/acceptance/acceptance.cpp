// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if
// any criterion fails. Thresholds are fixed below and not configurable.

#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "echoscope/engine.hpp"
#include "echoscope/log.hpp"
#include "echoscope/oracle.hpp"
#include "echoscope/synth.hpp"
#include "stat_oracles.hpp"

namespace fs = std::filesystem;
using namespace echoscope;

namespace {

// Pinned tolerances and run counts.
constexpr double kOracleTol = 1e-12;
constexpr double kOracleBudgetSec = 60.0;
constexpr std::size_t kOracleBundles = 100;
constexpr std::size_t kAlgebraSamples = 100'000;
constexpr double kPearsonTol = 1e-10;
constexpr double kExactPTol = 1e-9;
constexpr std::size_t kRuns = 20;
constexpr std::size_t kRunUsers = 2000;
constexpr double kLambda = 0.2;
constexpr double kBeta = 5.0;
constexpr double kRunBudgetSec = 60.0;
constexpr std::size_t kOrderingMinRuns = 19;
constexpr std::size_t kTrendMinRuns = 18;
constexpr double kNullMeanDelta = 0.02;
constexpr double kNullAlpha = 0.05;
constexpr double kEntropyP = 1e-3;
constexpr std::size_t kEntropyMinRuns = 19;
constexpr std::size_t kCongruenceMinRuns = 18;
constexpr double kReportBudgetSec = 120.0;
constexpr double kReportBudgetMb = 2048.0;
constexpr std::size_t kLargeEdges = 1'000'000;
constexpr std::size_t kLargeEvents = 100'000;
constexpr std::array<std::uint32_t, 4> kTrendKs{1, 2, 5, 10};

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / fmt::format("echoscope-acceptance-{}-{}", name, ::getpid());
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// ---- 1. oracle equivalence -------------------------------------------------

Outcome oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::string worst_name;
    std::size_t failed = 0, compared = 0;
    for (std::size_t i = 0; i < kOracleBundles; ++i) {
        SynthConfig c;
        c.seed = 1000 + i;
        c.n_users = 10 + i % 41;
        c.n_domains = 5 + i % 30;
        c.activity_rate = 4 + double(i % 7);
        c.retweet_rate = 2 + double(i % 5);
        c.base_follow_prob = 0.6 + 0.1 * double(i % 4);
        c.follow_homophily = 0.2 + 0.3 * double(i % 3);
        c.attention_bias = double(i % 6);
        c.reshare_fraction = (i % 3) * 0.2;
        const auto b = generate(c).bundle;
        if (b.log.size() > 1000) {
            ++failed;
            continue;
        }
        OracleOptions o;
        o.ks = {1, 2, 3, 5, 10};
        o.unique_domains = i % 4 == 1;
        if (i % 5 == 2) o.window = Window{c.start_time + 5 * 86400, c.start_time + 20 * 86400};
        const auto ref = oracle_metrics(b, o);
        for (auto exec : {Execution::Serial, Execution::Parallel}) {
            const auto cmp = compare_metrics(engine_metrics(b, o, exec), ref);
            compared += cmp.compared;
            if (!cmp.passed(kOracleTol)) ++failed;
            if (cmp.max_abs_diff > worst) worst = cmp.max_abs_diff, worst_name = cmp.worst_metric;
        }
    }
    const double secs = seconds_since(t0);
    return {failed == 0 && secs < kOracleBudgetSec,
            fmt::format("{} bundles, {} values, {} failures, max diff {:.3g}{}, {:.1f}s", kOracleBundles, compared,
                        failed, worst, worst_name.empty() ? "" : " at " + worst_name, secs)};
}

// ---- 2. fold / normalize algebra -------------------------------------------

Outcome fold_algebra() {
    Stream rng(2, StreamOp::Test, 0);
    std::size_t failures = 0;
    std::vector<double> mu(kAlgebraSamples);
    for (auto& m : mu) {
        m = rng.uniform();
        const double f = fold(m);
        if (fold(1.0 - m) != f && std::abs(fold(1.0 - m) - f) > 1e-15) ++failures;
        if (f < 0.5 || f > 1.0) ++failures;
    }
    for (double edge : {0.0, 0.5, 1.0})
        if (fold(edge) != (edge == 0.5 ? 0.5 : 1.0)) ++failures;

    const auto norm = Normalization::fit(mu);
    const auto lo = std::min_element(mu.begin(), mu.end()) - mu.begin();
    const auto hi = std::max_element(mu.begin(), mu.end()) - mu.begin();
    if (norm.apply(mu[lo]) != 0.0 || norm.apply(mu[hi]) != 1.0) ++failures;
    std::vector<std::size_t> order(mu.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return mu[a] < mu[b]; });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (norm.apply(mu[order[i - 1]]) > norm.apply(mu[order[i]])) ++failures;
    for (double m : mu)
        if (double v = norm.apply(m); v < 0.0 || v > 1.0) ++failures;
    return {failures == 0, fmt::format("{} values, {} failures", kAlgebraSamples, failures)};
}

// ---- 3. statistical primitives ---------------------------------------------

Outcome statistical_primitives() {
    Stream rng(3, StreamOp::Test, 0);
    double pearson_worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto n = 3 + rng.below(200);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.normal();
            y[i] = 0.5 * x[i] + rng.normal();
        }
        pearson_worst = std::max(pearson_worst, std::abs(pearson(x, y).r - double(testing::direct_pearson(x, y))));
    }

    double p_worst = 0.0;
    std::size_t u_sum_failures = 0;
    for (std::size_t n = 1; n <= 5; ++n)
        for (int t = 0; t < 40; ++t) {
            std::vector<double> a(n), b(n);
            // Coarse values so ties are common.
            for (auto& v : a) v = double(rng.below(t % 2 ? 4 : 1000));
            for (auto& v : b) v = double(rng.below(t % 2 ? 4 : 1000));
            p_worst = std::max(p_worst, std::abs(mann_whitney_u_exact(a, b).p - testing::permutation_p(a, b)));
        }
    for (int t = 0; t < 2000; ++t) {
        const auto n1 = 1 + rng.below(60), n2 = 1 + rng.below(60);
        std::vector<double> a(n1), b(n2);
        for (auto& v : a) v = double(rng.below(10));
        for (auto& v : b) v = double(rng.below(10));
        const double ua = mann_whitney_u(a, b).u_statistic, ub = mann_whitney_u(b, a).u_statistic;
        if (ua + ub != double(n1 * n2)) ++u_sum_failures;
    }

    std::size_t entropy_failures = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto bins = 2 + rng.below(20);
        std::vector<double> v(1 + rng.below(100));
        for (auto& x : v) x = rng.uniform();
        const double h = shannon_entropy(v, bins);
        if (h < 0.0 || h > std::log2(double(bins)) + 1e-12) ++entropy_failures;
    }
    if (shannon_entropy(std::vector<double>{0.1, 0.2, 0.3}, 2) != 0.0) ++entropy_failures;
    if (shannon_entropy(std::vector<double>{0.1, 0.9}, 2) != 1.0) ++entropy_failures;

    const bool ok = pearson_worst <= kPearsonTol && p_worst <= kExactPTol && u_sum_failures == 0 &&
                    entropy_failures == 0;
    return {ok, fmt::format("pearson max diff {:.2g}, exact-p max diff {:.2g}, U-sum failures {}, entropy "
                            "failures {}",
                            pearson_worst, p_worst, u_sum_failures, entropy_failures)};
}

// ---- 4-8. planted-structure runs -------------------------------------------

struct RunStats {
    double seconds = 0.0;
    double r_f = 0.0, r_r = 0.0;
    std::array<double, kTrendKs.size()> r_delta{};
    double mean_delta = 0.0;
    double trend_slope = 0.0;
    double entropy_p = 1.0;
    double entropy_median_f = 0.0, entropy_median_r = 0.0;
    double cong_moderate = 0.0, cong_hardliner = 0.0;
    std::size_t cong_n_moderate = 0, cong_n_hardliner = 0;
};

double median(std::vector<double> v) {
    if (v.empty()) return NAN;
    std::sort(v.begin(), v.end());
    const auto m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double pearson_or_nan(const std::vector<double>& x, const std::vector<double>& y) {
    try {
        return pearson(x, y).r;
    } catch (const UndefinedStatistic&) {
        return NAN;
    }
}

// The planted family for criteria 4-8 lives in data/planted_family.conf.
// Sparse following (about 16 friends per user) with heavy retweeting gives
// each user enough retweet friends for their exposure estimate to be about
// as precise as the follower one; with the generator defaults the retweet
// pool is so small that sampling noise, not attention, decides which
// correlation is larger.
SynthConfig planted_family(double beta, std::uint64_t seed) {
    static const auto base = parse_synth_config(ECHOSCOPE_PLANTED_CONF);
    // The criteria fix these two; the file only tunes the rest.
    if (base.n_users != kRunUsers || base.follow_homophily != kLambda)
        throw InputError("planted family must have n_users=2000 and lambda=0.2");
    auto c = base;
    c.attention_bias = beta;
    c.seed = seed;
    return c;
}

RunStats planted_run(double beta, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = planted_family(beta, seed);
    const auto data = generate(c);
    const auto& b = data.bundle;
    const auto fg = FollowerGraph::build(b.edges, b.seeds, b.users.size());
    const auto rg = RetweetGraph::build(b.log, b.seeds, b.users.size());
    const Engine engine(b, fg, rg);

    RunStats s;
    std::vector<double> ks;
    for (std::size_t i = 0; i < kTrendKs.size(); ++i) {
        const auto k = kTrendKs[i];
        const auto t = engine.metrics(k);
        std::vector<double> ms_f, me_f, ms_r, me_r, ms_d, delta;
        for (const auto& r : t.seeds) {
            if (!r.m_s) continue;
            if (r.m_e_f) ms_f.push_back(*r.m_s), me_f.push_back(*r.m_e_f);
            if (r.m_e_r) ms_r.push_back(*r.m_s), me_r.push_back(*r.m_e_r);
            if (r.delta) ms_d.push_back(*r.m_s), delta.push_back(*r.delta);
        }
        s.r_delta[i] = pearson_or_nan(delta, ms_d);
        ks.push_back(double(k));
        if (k != 1) continue;

        s.r_f = pearson_or_nan(ms_f, me_f);
        s.r_r = pearson_or_nan(ms_r, me_r);
        s.mean_delta = delta.empty() ? NAN : std::accumulate(delta.begin(), delta.end(), 0.0) / double(delta.size());

        const auto ent = entropy_comparison(fg.seeds(), fg, rg, t.user_ms, k, 5);
        std::vector<double> hf, hr;
        for (std::size_t j = 0; j < ent.follower.size(); ++j) {
            hf.push_back(ent.follower[j].entropy);
            hr.push_back(ent.retweet[j].entropy);
        }
        if (ent.test) s.entropy_p = ent.test->p;
        s.entropy_median_f = median(hf);
        s.entropy_median_r = median(hr);

        double sum_m = 0, sum_h = 0;
        for (auto u : fg.seeds()) {
            const auto d = congruent_friend_fraction_diff(u, fg, rg, t.user_ms, k);
            if (!d) continue;
            if (d->cls == ModeracyClass::Moderate) sum_m += d->diff, ++s.cong_n_moderate;
            else sum_h += d->diff, ++s.cong_n_hardliner;
        }
        s.cong_moderate = s.cong_n_moderate ? sum_m / double(s.cong_n_moderate) : NAN;
        s.cong_hardliner = s.cong_n_hardliner ? sum_h / double(s.cong_n_hardliner) : NAN;
    }
    std::vector<double> x, y;
    for (std::size_t i = 0; i < ks.size(); ++i)
        if (std::isfinite(s.r_delta[i])) x.push_back(ks[i]), y.push_back(s.r_delta[i]);
    s.trend_slope = x.size() >= 2 ? ols_slope(x, y) : NAN;
    s.seconds = seconds_since(t0);
    return s;
}

std::vector<RunStats> planted_runs(double beta) {
    std::vector<RunStats> runs;
    for (std::size_t i = 0; i < kRuns; ++i) {
        runs.push_back(planted_run(beta, 1 + i));
        const auto& r = runs.back();
        spdlog::info("beta={} seed={}: r_f={:.3f} r_r={:.3f} r_delta=[{:.3f} {:.3f} {:.3f} {:.3f}] mean_delta={:.4f} "
                     "H p={:.2g} ({:.3f} vs {:.3f}) cong m={:.3f} h={:.3f} {:.1f}s",
                     beta, 1 + i, r.r_f, r.r_r, r.r_delta[0], r.r_delta[1], r.r_delta[2], r.r_delta[3],
                     r.mean_delta, r.entropy_p, r.entropy_median_f, r.entropy_median_r, r.cong_moderate,
                     r.cong_hardliner, r.seconds);
    }
    return runs;
}

Outcome echo_ordering(const std::vector<RunStats>& runs) {
    std::size_t good = 0;
    double slowest = 0.0;
    for (const auto& r : runs) {
        good += r.r_r > r.r_f && r.r_f > 0.0;
        slowest = std::max(slowest, r.seconds);
    }
    return {good >= kOrderingMinRuns && slowest < kRunBudgetSec,
            fmt::format("{}/{} runs with r_r > r_f > 0 (need {}), slowest run {:.1f}s", good, runs.size(),
                        kOrderingMinRuns, slowest)};
}

Outcome bias_trend(const std::vector<RunStats>& runs) {
    std::size_t good = 0;
    for (const auto& r : runs) {
        bool ok = r.r_delta[0] < 0.0;
        for (std::size_t i = 1; i < r.r_delta.size(); ++i) ok = ok && r.r_delta[i] <= r.r_delta[i - 1];
        good += ok;
    }
    return {good >= kTrendMinRuns, fmt::format("{}/{} runs negative at k=1 and non-increasing over k=1,2,5,10 "
                                               "(need {})",
                                               good, runs.size(), kTrendMinRuns)};
}

Outcome null_model(const std::vector<RunStats>& runs) {
    // Mean delta pooled over runs; the k-trend is judged by a one-sided
    // t-test on the per-run slopes of r(delta, m_s) against k.
    std::vector<double> deltas, slopes;
    for (const auto& r : runs) {
        if (std::isfinite(r.mean_delta)) deltas.push_back(r.mean_delta);
        if (std::isfinite(r.trend_slope)) slopes.push_back(r.trend_slope);
    }
    const double mean_delta = std::accumulate(deltas.begin(), deltas.end(), 0.0) / double(deltas.size());
    const double n = double(slopes.size());
    const double mean_slope = std::accumulate(slopes.begin(), slopes.end(), 0.0) / n;
    double ss = 0.0;
    for (double s : slopes) ss += (s - mean_slope) * (s - mean_slope);
    const double se = std::sqrt(ss / (n - 1.0) / n);
    const double t = mean_slope / se;
    const double p_negative = student_t_cdf(t, n - 1.0);
    const bool ok = std::abs(mean_delta) < kNullMeanDelta && p_negative >= kNullAlpha;
    return {ok, fmt::format("mean delta {:.4f} (limit {}), slope {:.4f} per k, one-sided p={:.3f} (alpha {})",
                            mean_delta, kNullMeanDelta, mean_slope, p_negative, kNullAlpha)};
}

Outcome entropy_claim(const std::vector<RunStats>& runs) {
    std::size_t good = 0;
    for (const auto& r : runs) good += r.entropy_p < kEntropyP && r.entropy_median_r < r.entropy_median_f;
    return {good >= kEntropyMinRuns,
            fmt::format("{}/{} runs with retweet entropy lower at p<{} (need {})", good, runs.size(), kEntropyP,
                        kEntropyMinRuns)};
}

Outcome congruence_claim(const std::vector<RunStats>& runs) {
    std::size_t good = 0;
    for (const auto& r : runs)
        good += r.cong_moderate > 0.0 && r.cong_hardliner > 0.0 && r.cong_hardliner > r.cong_moderate;
    return {good >= kCongruenceMinRuns,
            fmt::format("{}/{} runs with both diffs > 0 and hardliner > moderate (need {})", good, runs.size(),
                        kCongruenceMinRuns)};
}

// ---- 9. determinism and scale ----------------------------------------------

struct ChildRun {
    int exit_code = -1;
    double seconds = 0.0;
    double peak_mb = 0.0;
};

ChildRun run_cli(const std::vector<std::string>& args) {
    std::vector<char*> argv;
    std::string exe = ECHOSCOPE_CLI;
    argv.push_back(exe.data());
    std::vector<std::string> copy(args);
    for (auto& a : copy) argv.push_back(a.data());
    argv.push_back(nullptr);
    const auto t0 = std::chrono::steady_clock::now();
    const pid_t pid = fork();
    if (pid == 0) {
        execv(exe.c_str(), argv.data());
        _exit(127);
    }
    ChildRun r;
    int status = 0;
    rusage usage{};
    if (pid < 0 || wait4(pid, &status, 0, &usage) != pid) return r;
    r.seconds = seconds_since(t0);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.peak_mb = double(usage.ru_maxrss) / 1024.0;
    return r;
}

std::vector<std::string> report_args(const fs::path& in, const fs::path& out, std::vector<std::string> extra) {
    std::vector<std::string> args{"report",
                                  "--scores", (in / "scores.csv").string(),
                                  "--edges", (in / "edges.csv").string(),
                                  "--events", (in / "events.jsonl").string(),
                                  "--seeds", (in / "seeds.txt").string(),
                                  "--out", out.string(),
                                  "--no-cache"};
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism_and_scale() {
    const auto root = scratch("c9");
    std::vector<std::string> notes;
    bool ok = true;

    // Byte identity across thread counts.
    SynthConfig small;
    small.n_users = 400;
    small.seed = 9;
    small.reshare_fraction = 0.2;
    write_synth(root / "small", generate(small), small);
    std::array<fs::path, 2> outs{root / "t1", root / "t8"};
    std::array<int, 2> threads{1, 8};
    for (std::size_t i = 0; i < 2; ++i) {
        const auto args = report_args(root / "small", outs[i], {"--reps", "200", "--threads",
                                                                 std::to_string(threads[i])});
        if (run_cli(args).exit_code != 0) {
            ok = false;
            notes.push_back(fmt::format("report with {} threads failed", threads[i]));
        }
    }
    std::size_t files = 0, differing = 0;
    for (const auto& entry : fs::directory_iterator(outs[0])) {
        ++files;
        const auto other = outs[1] / entry.path().filename();
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
    }
    std::size_t other_files = std::distance(fs::directory_iterator(outs[1]), fs::directory_iterator{});
    if (files == 0 || differing != 0 || files != other_files) ok = false;
    notes.push_back(fmt::format("threads 1 vs 8: {} files, {} differ", files, differing));

    // Scale: about 10^6 follow edges and 10^5 events.
    SynthConfig big;
    big.n_users = 5000;
    big.follow_homophily = 0.2;
    big.base_follow_prob = 0.125;
    big.activity_rate = 14.0;
    big.retweet_rate = 6.0;
    big.seed = 2014;
    const auto data = generate(big);
    const auto n_edges = data.bundle.edges.edges.size();
    const auto n_events = data.bundle.log.size();
    write_synth(root / "big", data, big);
    const bool sized = n_edges >= kLargeEdges * 9 / 10 && n_events >= kLargeEvents * 9 / 10;
    const auto args = report_args(root / "big", root / "big-out",
                                  {"--k-min", "1", "--k-max", "10", "--reps", "1000", "--baseline-users", "100"});
    const auto run = run_cli(args);
    const bool fast = run.exit_code == 0 && run.seconds < kReportBudgetSec && run.peak_mb < kReportBudgetMb;
    ok = ok && sized && fast;
    notes.push_back(fmt::format("{} edges / {} events: exit {}, {:.1f}s (limit {}s), peak {:.0f} MB (limit {} MB)",
                                n_edges, n_events, run.exit_code, run.seconds, kReportBudgetSec, run.peak_mb,
                                kReportBudgetMb));
    fs::remove_all(root);
    std::string detail;
    for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
    return {ok, detail};
}

}  // namespace

int main() {
    init_logging();
    // Degenerate-normalization warnings from tiny oracle bundles are expected.
    if (!std::getenv("ECHOSCOPE_LOG")) spdlog::set_level(spdlog::level::err);
    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, fmt::format("error: {}", e.what())};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << o.detail
                  << std::endl;
        failures += o.pass ? 0 : 1;
    };
    report(1, "oracle equivalence", oracle_equivalence);
    report(2, "fold/normalize algebra", fold_algebra);
    report(3, "statistical primitives", statistical_primitives);
    const auto biased = planted_runs(kBeta);
    report(4, "echo-chamber ordering", [&] { return echo_ordering(biased); });
    report(5, "bias-threshold trend", [&] { return bias_trend(biased); });
    report(6, "null model", [] { return null_model(planted_runs(0.0)); });
    report(7, "entropy", [&] { return entropy_claim(biased); });
    report(8, "congruence", [&] { return congruence_claim(biased); });
    report(9, "determinism and scale", determinism_and_scale);
    return failures == 0 ? 0 : 1;
}
