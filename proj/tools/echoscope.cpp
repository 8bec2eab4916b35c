// echoscope command-line front end.
//
// Exit codes: 0 success, 1 internal error, 2 bad input (or failed validation).

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "echoscope/ingest.hpp"
#include "echoscope/log.hpp"
#include "echoscope/oracle.hpp"
#include "echoscope/report.hpp"
#include "echoscope/synth.hpp"

namespace fs = std::filesystem;
using namespace echoscope;

namespace {

struct InputFlags {
    std::string scores, edges, events, seeds;

    void attach(CLI::App* app) {
        app->add_option("--scores", scores, "domain,score CSV")->required();
        app->add_option("--edges", edges, "follower,friend CSV")->required();
        app->add_option("--events", events, "tweet events, one JSON object per line")->required();
        app->add_option("--seeds", seeds, "seed user list (default: every follower in --edges)");
    }
    DatasetPaths paths() const {
        DatasetPaths p{scores, edges, events, std::nullopt};
        if (!seeds.empty()) p.seeds = seeds;
        return p;
    }
};

void write_json(const std::string& out, const nlohmann::ordered_json& j) {
    if (out.empty() || out == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    const fs::path path(out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write " + out);
    f << j.dump(2) << '\n';
}

// `report --config FILE` holds key=value lines named like the long flags.
// They are spliced in ahead of the command-line flags, and the last
// occurrence of an option wins, so explicit flags override the file.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] != "report") return args;
    std::vector<std::string> rest{args[0]}, injected;
    for (std::size_t i = 1; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[++i];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
        else {
            rest.push_back(args[i]);
            continue;
        }
        std::ifstream in(path);
        if (!in) throw InputError("cannot open config " + path);
        std::string line;
        for (int line_no = 1; std::getline(in, line); ++line_no) {
            const auto b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos || line[b] == '#' || line[b] == ';') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw InputError(fmt::format("{}:{}: expected key=value", path, line_no));
            auto trim = [](std::string x) {
                const auto l = x.find_first_not_of(" \t\r\"");
                const auto r = x.find_last_not_of(" \t\r\"");
                return l == std::string::npos ? std::string() : x.substr(l, r - l + 1);
            };
            auto key = trim(line.substr(0, eq));
            std::replace(key.begin(), key.end(), '_', '-');
            if (key == "config") throw InputError("config files cannot include other config files");
            injected.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
        }
    }
    rest.insert(rest.begin() + 1, injected.begin(), injected.end());
    return rest;
}

}  // namespace

int main(int argc, char** argv) {
    init_logging();
    CLI::App app{"echoscope: political echo-chamber metrics for follow and retweet networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // validate
    auto* validate = app.add_subcommand("validate", "check inputs and print a JSON validation report");
    InputFlags validate_in;
    validate_in.attach(validate);
    std::string validate_out;
    validate->add_option("--out", validate_out, "write the report here instead of stdout");

    // report
    auto* report = app.add_subcommand("report", "compute every metric and write the report bundle");
    std::string config_file;
    report->add_option("--config", config_file, "key=value file of report options (keys are the long flag names)");
    InputFlags report_in;
    report_in.attach(report);
    RunConfig cfg;
    std::string out_dir, window, overlap = "both";
    report->add_option("--out", out_dir, "output directory")->required();
    report->add_option("--k-min", cfg.k_min, "smallest retweet threshold")->capture_default_str();
    report->add_option("--k-max", cfg.k_max, "largest retweet threshold")->capture_default_str();
    report->add_option("--entropy-bins", cfg.entropy_bins)->capture_default_str();
    report->add_option("--heatmap-bins", cfg.heatmap_bins)->capture_default_str();
    report->add_option("--reps", cfg.reps, "random-baseline repetitions")->capture_default_str();
    report->add_option("--baseline-users", cfg.baseline_users, "cap on random-baseline users (0: all)")
        ->capture_default_str();
    report->add_option("--samples", cfg.samples, "indegree-sampling draws")->capture_default_str();
    report->add_option("--seed", cfg.seed)->capture_default_str();
    report->add_option("--window", window, "FROM..TO, epoch seconds or ISO-8601 dates");
    report->add_option("--overlap-mode", overlap, "account, content or both")->capture_default_str();
    report->add_flag("--unique-domains", cfg.unique_domains, "count each domain once per pool");
    report->add_option("--threads", cfg.threads, "worker threads (0: OpenMP default)");
    bool no_cache = false;
    report->add_flag("--no-cache", no_cache, "ignore and do not write the graph cache");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset with known ground truth");
    std::string synth_config, synth_out;
    std::optional<std::uint64_t> synth_seed;
    synth->add_option("config", synth_config, "key=value generator configuration")->check(CLI::ExistingFile);
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--seed", synth_seed, "override the configured seed");

    // oracle-check
    auto* oracle = app.add_subcommand("oracle-check", "compare engine metrics against the brute-force oracle");
    InputFlags oracle_in;
    oracle_in.attach(oracle);
    OracleOptions oopts;
    std::string oracle_out, oracle_window;
    double tolerance = 1e-12;
    oracle->add_option("--ks", oopts.ks, "retweet thresholds to compare")->capture_default_str();
    oracle->add_option("--max-events", oopts.max_events, "refuse larger logs")->capture_default_str();
    oracle->add_option("--entropy-bins", oopts.entropy_bins)->capture_default_str();
    oracle->add_option("--window", oracle_window, "FROM..TO");
    oracle->add_flag("--unique-domains", oopts.unique_domains);
    oracle->add_option("--tolerance", tolerance)->capture_default_str();
    oracle->add_option("--out", oracle_out, "write the diff report here instead of stdout");

    try {
        auto args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const InputError& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*validate) {
            const auto bundle = load_dataset(validate_in.paths());
            const auto v = validate_dataset(bundle);
            auto j = v.to_json();
            j["psl_version"] = PublicSuffixList::bundled().version();
            write_json(validate_out, j);
            return v.error_count() == 0 ? 0 : 2;
        }
        if (*report) {
            cfg.paths = report_in.paths();
            cfg.out_dir = out_dir;
            if (!window.empty()) cfg.window = parse_window(window);
            cfg.overlap = parse_overlap_selection(overlap);
            cfg.use_cache = !no_cache;
            const auto t0 = std::chrono::steady_clock::now();
            const auto s = run_report(cfg);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            spdlog::info("report: {} seeds ({} scored), {} files, cache {}, {:.2f}s", s.seeds, s.scored_seeds,
                         s.files.size(), s.cache_hit ? "hit" : "miss", secs);
            return 0;
        }
        if (*synth) {
            auto sc = synth_config.empty() ? SynthConfig{} : parse_synth_config(synth_config);
            if (synth_seed) sc.seed = *synth_seed;
            sc.validate();
            write_synth(synth_out, generate(sc), sc);
            return 0;
        }
        if (*oracle) {
            if (!oracle_window.empty()) oopts.window = parse_window(oracle_window);
            const auto bundle = load_dataset(oracle_in.paths());
            if (bundle.log.size() > oopts.max_events)
                throw InputError(fmt::format("event log has {} events; the oracle is limited to {}",
                                             bundle.log.size(), oopts.max_events));
            const auto cmp = compare_metrics(engine_metrics(bundle, oopts), oracle_metrics(bundle, oopts));
            nlohmann::ordered_json j;
            j["compared"] = cmp.compared;
            j["absent_in_both"] = cmp.absent_both;
            j["presence_mismatches"] = cmp.presence_mismatches;
            j["max_abs_diff"] = cmp.max_abs_diff;
            j["worst_metric"] = cmp.worst_metric;
            j["tolerance"] = tolerance;
            j["passed"] = cmp.passed(tolerance);
            write_json(oracle_out, j);
            return cmp.passed(tolerance) ? 0 : 1;
        }
    } catch (const InputError& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        spdlog::error("malformed input: {}", e.what());
        return 2;
    } catch (const fs::filesystem_error& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("internal error: {}", e.what());
        return 1;
    }
    return 0;
}
