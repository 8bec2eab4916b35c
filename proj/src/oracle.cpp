#include "echoscope/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "echoscope/graph.hpp"

namespace echoscope {

namespace {

std::string key(const char* metric, std::uint32_t k, const std::string& user) {
    return fmt::format("{}[k={}][{}]", metric, k, user);
}

std::string key(const char* metric, const std::string& user) { return fmt::format("{}[{}]", metric, user); }

}  // namespace

MetricMap oracle_metrics(const DatasetBundle& bundle, const OracleOptions& options) {
    const auto& events = bundle.log.events();
    if (events.size() > options.max_events)
        throw InputError(fmt::format("oracle: {} events exceed the limit of {}", events.size(), options.max_events));

    auto name = [&](UserId id) { return bundle.users.name(id); };
    auto scored = [&](const std::string& d) -> std::optional<double> {
        for (const auto& [domain, score] : bundle.scores)
            if (domain == d) return score;
        return std::nullopt;
    };
    auto mean_of = [&](const std::vector<std::string>& domains) -> std::optional<double> {
        long double total = 0.0L;
        std::size_t count = 0;
        std::set<std::string> seen;
        for (const auto& d : domains) {
            const auto s = scored(d);
            if (!s) continue;
            if (options.unique_domains && !seen.insert(d).second) continue;
            total += *s;
            ++count;
        }
        if (count == 0) return std::nullopt;
        return static_cast<double>(total / count);
    };
    auto reflect = [](double mu) { return mu <= 0.5 ? 1.0 - mu : mu; };

    std::vector<std::string> seeds;
    for (auto s : bundle.seeds) seeds.push_back(name(s));

    // Raw means over original tweets, for every author.
    std::map<std::string, std::vector<std::string>> shared;
    for (const auto& e : events)
        if (e.kind == EventKind::Original)
            for (const auto& d : e.domains) shared[name(e.author)].push_back(d);
    std::map<std::string, double> mu, folded_ms;
    for (const auto& [user, domains] : shared)
        if (auto m = mean_of(domains)) {
            mu[user] = *m;
            folded_ms[user] = reflect(*m);
        }
    std::map<std::string, double> ms;
    if (!folded_ms.empty()) {
        double lo = 2.0, hi = -1.0;
        for (const auto& [u, v] : folded_ms) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (const auto& [u, v] : folded_ms) ms[u] = hi == lo ? 0.5 : (v - lo) / (hi - lo);
    }

    auto friends_of = [&](const std::string& u) {
        std::set<std::string> out;
        for (const auto& [a, b] : bundle.edges.edges)
            if (name(a) == u && name(b) != u) out.insert(name(b));
        return out;
    };
    auto retweet_counts = [&](const std::string& u) {
        std::map<std::string, std::size_t> counts;
        for (const auto& e : events)
            if (e.kind == EventKind::Retweet && name(e.author) == u) ++counts[name(*e.original_author)];
        return counts;
    };
    auto pool_of = [&](const std::set<std::string>& friends) {
        std::vector<std::string> pool;
        for (const auto& e : events)
            if (friends.contains(name(e.author)) && e.timestamp >= options.window.from &&
                e.timestamp <= options.window.to)
                pool.insert(pool.end(), e.domains.begin(), e.domains.end());
        return pool;
    };
    auto entropy_of = [&](const std::set<std::string>& friends) -> std::optional<double> {
        std::vector<std::size_t> bins(options.entropy_bins, 0);
        std::size_t total = 0;
        for (const auto& f : friends) {
            auto it = ms.find(f);
            if (it == ms.end()) continue;
            auto b = static_cast<std::size_t>(std::floor(it->second * double(options.entropy_bins)));
            if (b >= options.entropy_bins) b = options.entropy_bins - 1;
            ++bins[b];
            ++total;
        }
        if (total < 2) return std::nullopt;
        double h = 0.0;
        for (auto c : bins)
            if (c > 0) h -= double(c) / double(total) * std::log2(double(c) / double(total));
        return h;
    };

    MetricMap out;
    for (const auto& u : seeds) {
        out[key("mu", u)] = mu.contains(u) ? std::optional(mu[u]) : std::nullopt;
        out[key("m_s", u)] = ms.contains(u) ? std::optional(ms[u]) : std::nullopt;
    }

    for (auto k : options.ks) {
        struct Row {
            std::optional<double> ef, er;
        };
        std::map<std::string, Row> rows;
        std::vector<double> all;
        for (const auto& u : seeds) {
            const auto friends = friends_of(u);
            const auto counts = retweet_counts(u);
            std::set<std::string> rt_friends;
            for (const auto& [a, c] : counts)
                if (c >= k) rt_friends.insert(a);

            Row row;
            if (mu.contains(u)) {
                const double guard = mu[u];
                if (auto m = mean_of(pool_of(friends))) row.ef = guard > 0.5 ? *m : 1.0 - *m;
                if (auto m = mean_of(pool_of(rt_friends))) row.er = guard > 0.5 ? *m : 1.0 - *m;
            }
            if (row.ef) all.push_back(*row.ef);
            if (row.er) all.push_back(*row.er);
            rows[u] = row;

            std::size_t followed = 0, weight = 0, followed_weight = 0;
            for (const auto& a : rt_friends) {
                weight += counts.at(a);
                if (friends.contains(a)) {
                    ++followed;
                    followed_weight += counts.at(a);
                }
            }
            out[key("overlap_account", k, u)] =
                rt_friends.empty() ? std::nullopt : std::optional(double(followed) / double(rt_friends.size()));
            out[key("overlap_content", k, u)] =
                weight == 0 ? std::nullopt : std::optional(double(followed_weight) / double(weight));

            const auto hf = entropy_of(friends);
            const auto hr = entropy_of(rt_friends);
            out[key("entropy_f", k, u)] = hf && hr ? hf : std::nullopt;
            out[key("entropy_r", k, u)] = hf && hr ? hr : std::nullopt;
        }
        double lo = 0.0, hi = 0.0;
        if (!all.empty()) {
            lo = *std::min_element(all.begin(), all.end());
            hi = *std::max_element(all.begin(), all.end());
        }
        auto scale = [&](std::optional<double> v) -> std::optional<double> {
            if (!v) return std::nullopt;
            return hi == lo ? 0.5 : (*v - lo) / (hi - lo);
        };
        for (const auto& u : seeds) {
            const auto ef = scale(rows[u].ef), er = scale(rows[u].er);
            out[key("m_e_f", k, u)] = ef;
            out[key("m_e_r", k, u)] = er;
            out[key("delta", k, u)] = ef && er ? std::optional(*ef - *er) : std::nullopt;
        }
    }
    return out;
}

MetricMap engine_metrics(const DatasetBundle& bundle, const OracleOptions& options, Execution exec) {
    if (bundle.seeds.empty()) return {};
    const auto fg = FollowerGraph::build(bundle.edges, bundle.seeds, bundle.users.size());
    const auto rg = RetweetGraph::build(bundle.log, bundle.seeds, bundle.users.size());
    const Engine engine(bundle, fg, rg, options.window, options.unique_domains);

    MetricMap out;
    bool identity_done = false;
    for (auto k : options.ks) {
        const auto table = engine.metrics(k, exec);
        for (const auto& m : table.seeds) {
            const auto& u = bundle.users.name(m.user);
            if (!identity_done) {
                out[key("mu", u)] = m.raw_mean;
                out[key("m_s", u)] = m.m_s;
            }
            out[key("m_e_f", k, u)] = m.m_e_f;
            out[key("m_e_r", k, u)] = m.m_e_r;
            out[key("delta", k, u)] = m.delta;
            out[key("overlap_account", k, u)] = retweet_overlap(m.user, fg, rg, k, OverlapMode::Account);
            out[key("overlap_content", k, u)] = retweet_overlap(m.user, fg, rg, k, OverlapMode::Content);
            out[key("entropy_f", k, u)] = std::nullopt;
            out[key("entropy_r", k, u)] = std::nullopt;
        }
        identity_done = true;
        const auto ent = entropy_comparison(fg.seeds(), fg, rg, table.user_ms, k, options.entropy_bins, exec);
        for (std::size_t i = 0; i < ent.follower.size(); ++i) {
            const auto& u = bundle.users.name(ent.follower[i].user);
            out[key("entropy_f", k, u)] = ent.follower[i].entropy;
            out[key("entropy_r", k, u)] = ent.retweet[i].entropy;
        }
    }
    return out;
}

OracleComparison compare_metrics(const MetricMap& engine, const MetricMap& oracle) {
    OracleComparison c;
    std::set<std::string> names;
    for (const auto& [n, v] : engine) names.insert(n);
    for (const auto& [n, v] : oracle) names.insert(n);
    for (const auto& n : names) {
        const auto e = engine.find(n), o = oracle.find(n);
        const bool e_has = e != engine.end() && e->second.has_value();
        const bool o_has = o != oracle.end() && o->second.has_value();
        if (!e_has && !o_has) {
            ++c.absent_both;
            continue;
        }
        if (e_has != o_has) {
            c.presence_mismatches.push_back(n);
            continue;
        }
        ++c.compared;
        const double diff = std::abs(*e->second - *o->second);
        if (diff > c.max_abs_diff || (std::isnan(diff) && c.worst_metric.empty())) {
            c.max_abs_diff = std::isnan(diff) ? HUGE_VAL : diff;
            c.worst_metric = n;
        }
    }
    return c;
}

}  // namespace echoscope
