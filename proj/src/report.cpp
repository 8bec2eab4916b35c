#include "echoscope/report.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "echoscope/engine.hpp"
#include "echoscope/graph_cache.hpp"
#include "echoscope/log.hpp"
#include "echoscope/moderacy.hpp"
#include "echoscope/pld.hpp"
#include "echoscope/stats.hpp"

namespace echoscope {

using nlohmann::ordered_json;

std::string to_string(OverlapSelection s) {
    switch (s) {
        case OverlapSelection::Account: return "account";
        case OverlapSelection::Content: return "content";
        case OverlapSelection::Both: return "both";
    }
    return "both";
}

OverlapSelection parse_overlap_selection(const std::string& text) {
    if (text == "account") return OverlapSelection::Account;
    if (text == "content") return OverlapSelection::Content;
    if (text == "both") return OverlapSelection::Both;
    throw InputError("overlap mode must be account, content or both (got '" + text + "')");
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void RunConfig::validate() const {
    if (k_min < 1 || k_max < k_min) throw InputError(fmt::format("invalid k range {}..{}", k_min, k_max));
    if (entropy_bins < 2) throw InputError("entropy needs at least 2 bins");
    if (reps < 1) throw InputError("reps must be at least 1");
    if (heatmap_bins < 1) throw InputError("heatmap bins must be positive");
    if (threads < 0) throw InputError("threads must be non-negative");
}

ordered_json RunConfig::to_json() const {
    ordered_json j;
    j["scores"] = paths.scores.filename().string();
    j["edges"] = paths.edges.filename().string();
    j["events"] = paths.events.filename().string();
    j["seeds"] = paths.seeds ? ordered_json(paths.seeds->filename().string()) : ordered_json(nullptr);
    j["k_min"] = k_min;
    j["k_max"] = k_max;
    j["entropy_bins"] = entropy_bins;
    j["reps"] = reps;
    j["baseline_users"] = baseline_users;
    j["samples"] = samples;
    j["heatmap_bins"] = heatmap_bins;
    j["window"] = format_window(window);
    j["seed"] = seed;
    j["overlap_mode"] = to_string(overlap);
    j["unique_domains"] = unique_domains;
    return j;
}

std::string RunConfig::hash() const { return fmt::format("{:016x}", fnv1a64(to_json().dump())); }

LoadedDataset load_with_cache(const DatasetPaths& paths, const std::filesystem::path& cache_file, bool use_cache) {
    LoadedDataset out;
    std::vector<std::filesystem::path> inputs{paths.edges, paths.events};
    if (paths.seeds) inputs.push_back(*paths.seeds);
    std::uint64_t fingerprint = 0;
    if (use_cache) {
        fingerprint = fingerprint_files(inputs);
        if (auto cache = load_graph_cache(cache_file, fingerprint)) {
            // Registry order matches a fresh parse, so re-reading the events
            // yields the same ids the cached graphs were built with.
            out.bundle.users = std::move(cache->users);
            out.bundle.scores = parse_domain_scores(paths.scores);
            out.bundle.log = parse_events(paths.events, out.bundle.users);
            out.follower = std::move(cache->follower);
            out.retweet = std::move(cache->retweet);
            out.bundle.seeds = out.follower.seeds();
            out.cache_hit = true;
            spdlog::info("graph cache hit: {}", cache_file.string());
            return out;
        }
        spdlog::info("graph cache miss: {}", cache_file.string());
    }
    out.bundle = load_dataset(paths);
    if (out.bundle.seeds.empty()) throw InputError("no seed users: the edge list is empty and no seeds were given");
    const auto n = out.bundle.users.size();
    out.follower = FollowerGraph::build(out.bundle.edges, out.bundle.seeds, n);
    out.retweet = RetweetGraph::build(out.bundle.log, out.bundle.seeds, n);
    if (use_cache) {
        try {
            save_graph_cache(cache_file, GraphCache{fingerprint, out.bundle.users, out.follower, out.retweet});
        } catch (const std::exception& e) {
            spdlog::warn("could not write graph cache: {}", e.what());
        }
    }
    return out;
}

namespace {

// Shortest round-trip representation; empty cell for absent values.
std::string num(std::optional<double> v) { return v ? fmt::format("{}", *v) : std::string(); }

ordered_json opt_json(std::optional<double> v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json mean_json(std::span<const double> xs) {
    if (xs.empty()) return nullptr;
    CompensatedSum s;
    for (double x : xs) s.add(x);
    return s.value() / double(xs.size());
}

ordered_json median_json(std::vector<double> xs) {
    if (xs.empty()) return nullptr;
    std::sort(xs.begin(), xs.end());
    const auto n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

ordered_json corr_json(std::span<const double> x, std::span<const double> y) {
    ordered_json j;
    try {
        const auto c = pearson(x, y);
        j["r"] = c.r;
        j["p"] = c.p;
        j["p_display"] = format_p(c.p);
        j["n"] = c.n;
    } catch (const UndefinedStatistic& e) {
        j["r"] = nullptr;
        j["n"] = x.size();
        j["undefined"] = e.what();
    }
    return j;
}

ordered_json utest_json(const std::optional<UTestResult>& t) {
    if (!t) return nullptr;
    ordered_json j;
    j["u"] = t->u_statistic;
    j["p"] = t->p;
    j["p_display"] = format_p(t->p);
    j["n1"] = t->n1;
    j["n2"] = t->n2;
    j["exact"] = t->exact;
    return j;
}

ordered_json utest_json(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) return nullptr;
    try {
        return utest_json(mann_whitney_u(a, b));
    } catch (const UndefinedStatistic&) {
        return nullptr;
    }
}

class Output {
public:
    explicit Output(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::ofstream open(const std::string& name) {
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + (dir_ / name).string());
        files_.push_back(name);
        return out;
    }
    const std::vector<std::string>& files() const { return files_; }

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

struct Context {
    const RunConfig& cfg;
    const DatasetBundle& bundle;
    const FollowerGraph& fg;
    const RetweetGraph& rg;
    const Engine& engine;
    Output& out;
    ordered_json& report;
};

const std::string& name_of(const Context& c, UserId u) { return c.bundle.users.name(u); }

std::vector<UserId> pick_baseline_users(const Context& c, const MetricsTable& base) {
    std::vector<UserId> eligible;
    for (const auto& row : base.seeds)
        if (row.cls && !c.rg.friends(row.user, base.k).empty() && !c.fg.friends(row.user).empty())
            eligible.push_back(row.user);
    const auto cap = c.cfg.baseline_users;
    if (cap == 0 || eligible.size() <= cap) return eligible;
    Stream rng(c.cfg.seed, StreamOp::BaselineUserPick, 0);
    for (std::size_t i = 0; i < cap; ++i) std::swap(eligible[i], eligible[i + rng.below(eligible.size() - i)]);
    eligible.resize(cap);
    std::sort(eligible.begin(), eligible.end());
    return eligible;
}

void write_user_metrics(Context& c, const MetricsTable& t) {
    auto f = c.out.open("user_metrics.csv");
    f << "user,mu,m_s,m_e_f,m_e_r,delta,class,domain_count\n";
    std::size_t scored = 0, with_f = 0, with_r = 0, with_delta = 0, moderates = 0;
    for (const auto& r : t.seeds) {
        f << name_of(c, r.user) << ',' << num(r.raw_mean) << ',' << num(r.m_s) << ',' << num(r.m_e_f) << ','
          << num(r.m_e_r) << ',' << num(r.delta) << ',' << (r.cls ? to_string(*r.cls) : "") << ','
          << r.domain_count << '\n';
        scored += r.m_s.has_value();
        with_f += r.m_e_f.has_value();
        with_r += r.m_e_r.has_value();
        with_delta += r.delta.has_value();
        moderates += r.cls == ModeracyClass::Moderate;
    }
    auto norm_json = [](const std::optional<Normalization>& n) -> ordered_json {
        if (!n) return nullptr;
        return {{"min", n->min}, {"max", n->max}, {"degenerate", n->degenerate}};
    };
    ordered_json j;
    j["k"] = t.k;
    j["rows"] = t.seeds.size();
    j["scored"] = scored;
    j["moderate"] = moderates;
    j["hardliner"] = scored - moderates;
    j["with_follower_exposure"] = with_f;
    j["with_retweet_exposure"] = with_r;
    j["with_delta"] = with_delta;
    j["empty_follower_pool"] = t.seeds.size() - with_f;
    j["empty_retweet_pool"] = t.seeds.size() - with_r;
    j["m_s_normalization"] = norm_json(t.ms_norm);
    j["m_e_normalization"] = norm_json(t.me_norm);
    c.report["metrics"] = std::move(j);
}

void write_correlations(Context& c, const std::vector<MetricsTable>& tables) {
    auto j = ordered_json::array();
    for (const auto& t : tables) {
        std::vector<double> ms_f, me_f, ms_r, me_r, ms_d, d, d_mod, d_hard;
        auto f = c.out.open(fmt::format("delta_vs_ms_k{}.csv", t.k));
        f << "user,m_s,delta\n";
        for (const auto& r : t.seeds) {
            if (!r.m_s) continue;
            if (r.m_e_f) ms_f.push_back(*r.m_s), me_f.push_back(*r.m_e_f);
            if (r.m_e_r) ms_r.push_back(*r.m_s), me_r.push_back(*r.m_e_r);
            if (r.delta) {
                ms_d.push_back(*r.m_s);
                d.push_back(*r.delta);
                (r.cls == ModeracyClass::Moderate ? d_mod : d_hard).push_back(*r.delta);
                f << name_of(c, r.user) << ',' << num(r.m_s) << ',' << num(r.delta) << '\n';
            }
        }
        ordered_json e;
        e["k"] = t.k;
        e["m_s_vs_m_e_f"] = corr_json(ms_f, me_f);
        e["m_s_vs_m_e_r"] = corr_json(ms_r, me_r);
        e["m_s_vs_delta"] = corr_json(ms_d, d);
        e["mean_delta"] = mean_json(d);
        e["mean_delta_moderate"] = mean_json(d_mod);
        e["mean_delta_hardliner"] = mean_json(d_hard);
        e["delta_slope"] = ms_d.size() >= 2 ? ordered_json(ols_slope(ms_d, d)) : ordered_json(nullptr);
        j.push_back(std::move(e));
    }
    c.report["correlations"] = std::move(j);
}

void write_heatmaps(Context& c, const MetricsTable& t) {
    const auto bins = c.cfg.heatmap_bins;
    for (const auto kind : {GraphKind::Follower, GraphKind::Retweet}) {
        std::vector<std::uint64_t> counts(bins * bins, 0);
        std::uint64_t total = 0;
        for (const auto& r : t.seeds) {
            const auto me = kind == GraphKind::Follower ? r.m_e_f : r.m_e_r;
            if (!r.m_s || !me) continue;
            ++counts[bin_index(*r.m_s, bins) * bins + bin_index(*me, bins)];
            ++total;
        }
        auto f = c.out.open(kind == GraphKind::Follower ? "echo_heatmap_f.csv" : "echo_heatmap_r.csv");
        f << "m_s_bin,m_e_bin,m_s_lo,m_s_hi,m_e_lo,m_e_hi,count\n";
        const double w = 1.0 / double(bins);
        for (std::size_t i = 0; i < bins; ++i)
            for (std::size_t k = 0; k < bins; ++k)
                f << i << ',' << k << ',' << num(i * w) << ',' << num((i + 1) * w) << ',' << num(k * w) << ','
                  << num((k + 1) * w) << ',' << counts[i * bins + k] << '\n';
        c.report["heatmaps"][to_string(kind)] = {{"bins", bins}, {"users", total}};
    }
}

void write_class_fractions(Context& c, const MetricsTable& base) {
    const auto follower = c.engine.class_fractions(GraphKind::Follower, base.k);
    const auto retweet = c.engine.class_fractions(GraphKind::Retweet, base.k);
    const auto baseline_users = pick_baseline_users(c, base);
    const auto random = c.engine.random_baseline(baseline_users, base.k, c.cfg.reps, c.cfg.seed);

    std::vector<std::optional<ModeracyClass>> cls_of(c.bundle.users.size());
    for (const auto& r : base.seeds)
        if (r.user < cls_of.size()) cls_of[r.user] = r.cls;

    auto f = c.out.open("class_fractions.csv");
    f << "user,class,source,frac_moderate,frac_hardline,occurrences\n";
    ordered_json matrix;
    auto emit = [&](const char* source, std::span<const std::optional<ExposureProfile>> profiles) {
        std::vector<double> mod[2], hard[2];
        for (const auto& p : profiles) {
            if (!p || !cls_of[p->user]) continue;
            const auto cls = *cls_of[p->user];
            f << name_of(c, p->user) << ',' << to_string(cls) << ',' << source << ',' << num(p->frac_moderate)
              << ',' << num(p->frac_hardline) << ',' << p->n_domain_occurrences << '\n';
            const int i = cls == ModeracyClass::Moderate ? 0 : 1;
            mod[i].push_back(p->frac_moderate);
            hard[i].push_back(p->frac_hardline);
        }
        ordered_json m;
        for (int i = 0; i < 2; ++i)
            m[i == 0 ? "moderate" : "hardliner"] = {
                {"users", mod[i].size()}, {"moderate_share", mean_json(mod[i])}, {"hardline_share", mean_json(hard[i])}};
        matrix[source] = std::move(m);
    };
    emit("follower", follower);
    emit("retweet", retweet);
    emit("random", random);
    matrix["k"] = base.k;
    matrix["random_reps"] = c.cfg.reps;
    matrix["random_users"] = baseline_users.size();
    c.report["class_fractions"] = std::move(matrix);
}

void write_entropy(Context& c, const MetricsTable& base) {
    const auto cmp = entropy_comparison(c.bundle.seeds, c.fg, c.rg, base.user_ms, base.k, c.cfg.entropy_bins);
    auto f = c.out.open("entropy.csv");
    f << "user,entropy_follower,entropy_retweet,scored_friends_follower,scored_friends_retweet\n";
    std::vector<double> ef, er;
    for (std::size_t i = 0; i < cmp.follower.size(); ++i) {
        const auto& a = cmp.follower[i];
        const auto& b = cmp.retweet[i];
        f << name_of(c, a.user) << ',' << num(a.entropy) << ',' << num(b.entropy) << ',' << a.n_friends_scored
          << ',' << b.n_friends_scored << '\n';
        ef.push_back(a.entropy);
        er.push_back(b.entropy);
    }
    c.report["entropy"] = {{"k", base.k},
                           {"bins", c.cfg.entropy_bins},
                           {"users", cmp.follower.size()},
                           {"skipped", cmp.skipped},
                           {"mean_follower", mean_json(ef)},
                           {"mean_retweet", mean_json(er)},
                           {"median_follower", median_json(ef)},
                           {"median_retweet", median_json(er)},
                           {"test", utest_json(cmp.test)}};
}

void write_overlap(Context& c, const std::vector<std::uint32_t>& ks, std::uint32_t base_k) {
    std::vector<OverlapMode> modes;
    if (c.cfg.overlap != OverlapSelection::Content) modes.push_back(OverlapMode::Account);
    if (c.cfg.overlap != OverlapSelection::Account) modes.push_back(OverlapMode::Content);

    auto f = c.out.open("overlap_curve.csv");
    f << "mode,k,mean_overlap,users\n";
    auto curves = ordered_json::array();
    for (auto mode : modes) {
        const auto curve = overlap_vs_threshold(c.fg, c.rg, ks, mode);
        auto pts = ordered_json::array();
        for (const auto& p : curve.points) {
            const auto mean = p.n_users ? std::optional<double>(p.mean_overlap) : std::nullopt;
            f << to_string(mode) << ',' << p.k << ',' << num(mean) << ',' << p.n_users << '\n';
            pts.push_back({{"k", p.k}, {"mean_overlap", opt_json(mean)}, {"users", p.n_users}});
        }
        curves.push_back({{"mode", to_string(mode)}, {"points", std::move(pts)}});
    }

    auto u = c.out.open("overlap_users.csv");
    u << "user,friends_retweeted,overlap_account,overlap_content\n";
    std::vector<double> fr;
    for (auto s : c.bundle.seeds) {
        const auto a = fraction_friends_retweeted(s, c.fg, c.rg, base_k);
        const auto b = retweet_overlap(s, c.fg, c.rg, base_k, OverlapMode::Account);
        const auto d = retweet_overlap(s, c.fg, c.rg, base_k, OverlapMode::Content);
        u << name_of(c, s) << ',' << num(a) << ',' << num(b) << ',' << num(d) << '\n';
        if (a) fr.push_back(*a);
    }
    c.report["overlap"] = {{"k", base_k},
                           {"mean_friends_retweeted", mean_json(fr)},
                           {"median_friends_retweeted", median_json(fr)},
                           {"curves", std::move(curves)}};
}

void write_activity(Context& c, const MetricsTable& base) {
    const auto a = friend_activity_comparison(c.fg, c.rg, c.bundle.log, base.user_ms, base.k, c.cfg.window);
    auto f = c.out.open("activity.csv");
    f << "user,activity,retweeted,class\n";
    for (const auto& fr : a.friends)
        f << name_of(c, fr.user) << ',' << fr.activity << ',' << (fr.retweeted ? 1 : 0) << ','
          << (fr.cls ? to_string(*fr.cls) : "") << '\n';
    c.report["activity"] = {{"k", base.k},
                            {"friends", a.friends.size()},
                            {"median_retweeted", median_json(a.retweeted)},
                            {"median_not_retweeted", median_json(a.not_retweeted)},
                            {"median_retweeted_moderate", median_json(a.retweeted_moderate)},
                            {"median_retweeted_hardliner", median_json(a.retweeted_hardline)},
                            {"retweeted_vs_not", utest_json(a.retweeted_vs_not)},
                            {"hardliner_vs_moderate", utest_json(a.hardline_vs_moderate)}};
}

void write_congruence(Context& c, const MetricsTable& base) {
    auto f = c.out.open("congruence.csv");
    f << "user,class,frac_congruent_retweeted,frac_congruent_not_retweeted,diff,retweeted,not_retweeted\n";
    std::vector<double> diff[2], in[2], out[2];
    for (auto s : c.bundle.seeds) {
        const auto d = congruent_friend_fraction_diff(s, c.fg, c.rg, base.user_ms, base.k);
        if (!d) continue;
        f << name_of(c, s) << ',' << to_string(d->cls) << ',' << num(d->frac_congruent_retweeted) << ','
          << num(d->frac_congruent_not_retweeted) << ',' << num(d->diff) << ',' << d->n_retweeted << ','
          << d->n_not_retweeted << '\n';
        const int i = d->cls == ModeracyClass::Moderate ? 0 : 1;
        diff[i].push_back(d->diff);
        in[i].push_back(d->frac_congruent_retweeted);
        out[i].push_back(d->frac_congruent_not_retweeted);
    }
    ordered_json j;
    j["k"] = base.k;
    for (int i = 0; i < 2; ++i) {
        const auto positive = std::count_if(diff[i].begin(), diff[i].end(), [](double x) { return x > 0; });
        j[i == 0 ? "moderate" : "hardliner"] = {
            {"users", diff[i].size()},
            {"mean_diff", mean_json(diff[i])},
            {"positive_share",
             diff[i].empty() ? ordered_json(nullptr) : ordered_json(double(positive) / double(diff[i].size()))},
            {"test", utest_json(in[i], out[i])}};
    }
    c.report["congruence"] = std::move(j);
}

void write_score_distributions(Context& c, const MetricsTable& base) {
    constexpr std::size_t kBins = 20;
    const auto& ms = base.user_ms;
    auto f = c.out.open("score_distributions.csv");
    f << "source,bin,lo,hi,count,share\n";
    ordered_json j;
    auto emit = [&](const char* source, std::span<const UserId> draws) {
        std::vector<std::uint64_t> hist(kBins, 0);
        std::uint64_t scored = 0;
        CompensatedSum sum;
        for (auto u : draws) {
            if (u >= ms.size() || !ms[u]) continue;
            ++hist[bin_index(*ms[u], kBins)];
            ++scored;
            sum.add(*ms[u]);
        }
        for (std::size_t b = 0; b < kBins; ++b)
            f << source << ',' << b << ',' << num(double(b) / kBins) << ',' << num(double(b + 1) / kBins) << ','
              << hist[b] << ',' << (scored ? num(double(hist[b]) / double(scored)) : std::string()) << '\n';
        j[source] = {{"draws", draws.size()},
                     {"scored", scored},
                     {"mean_m_s", scored ? ordered_json(sum.value() / double(scored)) : ordered_json(nullptr)}};
    };

    std::vector<UserId> scored_seeds;
    for (const auto& r : base.seeds)
        if (r.m_s) scored_seeds.push_back(r.user);
    std::vector<UserId> draws;
    if (!scored_seeds.empty()) {
        Stream rng(c.cfg.seed, StreamOp::IndegreeSample, 0);
        draws.resize(c.cfg.samples);
        for (auto& d : draws) d = scored_seeds[rng.below(scored_seeds.size())];
    }
    emit("random_user", draws);

    // Graphs without any edge have nothing to sample from.
    auto sample = [&](std::span<const std::uint64_t> indeg, std::uint64_t entity) {
        if (std::all_of(indeg.begin(), indeg.end(), [](auto d) { return d == 0; })) return std::vector<UserId>{};
        Stream rng(c.cfg.seed, StreamOp::IndegreeSample, entity);
        return sample_by_indegree(indeg, c.cfg.samples, rng);
    };
    emit("follower_friend", sample(c.fg.indegrees(), 1));
    const auto rk = base.k > 1 ? c.rg.thresholded(base.k) : c.rg;
    emit("retweet_friend", sample(rk.indegrees(), 2));
    j["k"] = base.k;
    c.report["score_distributions"] = std::move(j);
}

}  // namespace

ReportSummary run_report(const RunConfig& cfg) {
    cfg.validate();
    set_thread_count(cfg.threads);
    std::filesystem::create_directories(cfg.out_dir);

    auto data = load_with_cache(cfg.paths, cfg.out_dir / "graph.cache", cfg.use_cache);
    const auto& bundle = data.bundle;
    if (bundle.seeds.empty()) throw InputError("no seed users");
    Engine engine(bundle, data.follower, data.retweet, cfg.window, cfg.unique_domains);

    std::vector<std::uint32_t> ks;
    for (auto k = cfg.k_min; k <= cfg.k_max; ++k) ks.push_back(k);
    std::vector<MetricsTable> tables;
    for (auto k : ks) tables.push_back(engine.metrics(k));
    const auto& base = tables.front();

    ordered_json report;
    report["tool"] = "echoscope";
    report["version"] = kVersion;
    report["config"] = cfg.to_json();
    report["config_hash"] = cfg.hash();
    report["seed"] = cfg.seed;
    report["psl_version"] = PublicSuffixList::bundled().version();

    std::size_t originals = 0;
    for (const auto& e : bundle.log.events()) originals += e.kind == EventKind::Original;
    report["dataset"] = {{"users", bundle.users.size()},
                         {"seeds", bundle.seeds.size()},
                         {"follow_edges", data.follower.edge_count()},
                         {"retweet_edges", data.retweet.edge_count()},
                         {"events", bundle.log.size()},
                         {"originals", originals},
                         {"retweets", bundle.log.size() - originals},
                         {"scored_domains", bundle.scores.size()},
                         {"urls", bundle.log.total_urls},
                         {"dropped_urls", bundle.log.dropped_urls}};

    Output out(cfg.out_dir);
    Context ctx{cfg, bundle, data.follower, data.retweet, engine, out, report};
    write_user_metrics(ctx, base);
    write_correlations(ctx, tables);
    write_heatmaps(ctx, base);
    write_class_fractions(ctx, base);
    write_entropy(ctx, base);
    write_overlap(ctx, ks, base.k);
    write_activity(ctx, base);
    write_congruence(ctx, base);
    write_score_distributions(ctx, base);

    ReportSummary summary;
    summary.seeds = bundle.seeds.size();
    summary.scored_seeds = report["metrics"]["scored"].get<std::size_t>();
    summary.cache_hit = data.cache_hit;
    report["files"] = out.files();
    {
        auto f = out.open("report.json");
        f << report.dump(2) << '\n';
    }
    summary.files = out.files();
    return summary;
}

}  // namespace echoscope
