#include "echoscope/moderacy.hpp"

#include <algorithm>
#include <set>

#include "echoscope/log.hpp"
#include "echoscope/rng.hpp"

namespace echoscope {

std::string to_string(GraphKind kind) { return kind == GraphKind::Follower ? "follower" : "retweet"; }
std::string to_string(ModeracyClass cls) { return cls == ModeracyClass::Moderate ? "moderate" : "hardliner"; }

std::optional<double> raw_mean_score(std::span<const double> scores) {
    if (scores.empty()) return std::nullopt;
    CompensatedSum s;
    for (double x : scores) s.add(x);
    return std::clamp(s.value() / double(scores.size()), 0.0, 1.0);
}

std::optional<double> raw_mean_score(std::span<const std::string> domains, const DomainScoreTable& table,
                                     bool unique) {
    std::vector<double> scores;
    std::set<std::string_view> seen;
    for (const auto& d : domains) {
        auto it = table.find(d);
        if (it == table.end()) continue;
        if (unique && !seen.insert(d).second) continue;
        scores.push_back(it->second);
    }
    return raw_mean_score(scores);
}

double fold(double mu) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw InputError("fold: score outside [0,1]");
    return mu > 0.5 ? mu : 1.0 - mu;
}

Normalization Normalization::fit(std::span<const double> values) {
    if (values.empty()) throw InputError("min-max normalization of an empty population");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    Normalization n;
    n.min = *lo;
    n.max = *hi;
    n.degenerate = n.max == n.min;
    if (n.degenerate) spdlog::warn("min-max normalization: all {} values equal; mapping to 0.5", values.size());
    return n;
}

std::map<UserId, double> minmax_normalize(const std::map<UserId, double>& scores) {
    if (scores.empty()) return {};
    std::vector<double> values;
    values.reserve(scores.size());
    for (const auto& [u, v] : scores) values.push_back(v);
    const auto norm = Normalization::fit(values);
    std::map<UserId, double> out;
    for (const auto& [u, v] : scores) out.emplace(u, norm.apply(v));
    return out;
}

ModeracyClass classify(double m_s) { return m_s <= 0.5 ? ModeracyClass::Moderate : ModeracyClass::Hardliner; }

std::optional<IndividualModeracy> individual_moderacy(UserId u, const EventLog& log, const DomainScoreTable& table,
                                                      bool unique) {
    std::vector<std::string> domains;
    for (auto pos : log.positions_of(u)) {
        const auto& e = log.events()[pos];
        if (e.kind != EventKind::Original) continue;
        domains.insert(domains.end(), e.domains.begin(), e.domains.end());
    }
    const auto mu = raw_mean_score(domains, table, unique);
    if (!mu) return std::nullopt;
    std::size_t scored = 0;
    for (const auto& d : domains) scored += table.contains(d) ? 1 : 0;
    return IndividualModeracy{*mu, fold(*mu), scored};
}

std::vector<UserId> exposure_friends(UserId u, GraphKind kind, const FollowerGraph& fg, const RetweetGraph& rg,
                                     std::uint32_t k) {
    if (kind == GraphKind::Follower) {
        const auto f = fg.friends(u);
        return {f.begin(), f.end()};
    }
    return rg.friends(u, k);
}

namespace {

template <class Fn>
void for_each_pool_domain(std::span<const UserId> friends, const EventLog& log, const Window& window, Fn&& fn) {
    for (auto f : friends)
        for (auto pos : log.positions_of(f)) {
            const auto& e = log.events()[pos];
            if (!window.contains(e.timestamp)) continue;
            for (const auto& d : e.domains) fn(d);
        }
}

}  // namespace

std::vector<double> exposure_pool(std::span<const UserId> friends, const EventLog& log,
                                  const DomainScoreTable& table, const Window& window) {
    std::vector<double> pool;
    for_each_pool_domain(friends, log, window, [&](const std::string& d) {
        if (auto it = table.find(d); it != table.end()) pool.push_back(it->second);
    });
    return pool;
}

std::optional<ExposureModeracy> exposure_moderacy(UserId u, GraphKind kind, const FollowerGraph& fg,
                                                  const RetweetGraph& rg, const EventLog& log,
                                                  const DomainScoreTable& table, std::uint32_t k,
                                                  const Window& window, std::optional<double> user_mu,
                                                  bool unique) {
    if (!user_mu) return std::nullopt;
    const auto friends = exposure_friends(u, kind, fg, rg, k);
    std::vector<double> pool;
    if (unique) {
        std::set<std::string_view> seen;
        for_each_pool_domain(friends, log, window, [&](const std::string& d) {
            if (auto it = table.find(d); it != table.end() && seen.insert(d).second) pool.push_back(it->second);
        });
    } else {
        pool = exposure_pool(friends, log, table, window);
    }
    const auto raw = raw_mean_score(pool);
    if (!raw) return std::nullopt;
    return ExposureModeracy{*raw, fold_by(*raw, *user_mu), pool.size()};
}

ModeracyClass classify_domain_score(double score) { return classify(fold(score)); }

std::optional<ExposureProfile> class_fractions(std::span<const double> pool) {
    if (pool.empty()) return std::nullopt;
    std::size_t moderate = 0;
    for (double s : pool) moderate += classify_domain_score(s) == ModeracyClass::Moderate ? 1 : 0;
    ExposureProfile p;
    p.n_domain_occurrences = pool.size();
    p.frac_moderate = double(moderate) / double(pool.size());
    p.frac_hardline = double(pool.size() - moderate) / double(pool.size());
    return p;
}

std::optional<ExposureProfile> exposure_class_fractions(UserId u, GraphKind kind, const FollowerGraph& fg,
                                                        const RetweetGraph& rg, const EventLog& log,
                                                        const DomainScoreTable& table, std::uint32_t k,
                                                        const Window& window) {
    const auto friends = exposure_friends(u, kind, fg, rg, k);
    auto profile = class_fractions(exposure_pool(friends, log, table, window));
    if (profile) {
        profile->user = u;
        profile->kind = kind;
    }
    return profile;
}

std::optional<ExposureProfile> random_baseline_fractions(UserId u, const FollowerGraph& fg, const RetweetGraph& rg,
                                                         const EventLog& log, const DomainScoreTable& table,
                                                         std::uint32_t k, const Window& window, std::size_t reps,
                                                         std::uint64_t seed) {
    const auto size = rg.friends(u, k).size();
    if (size == 0 || fg.friends(u).empty()) return std::nullopt;
    Stream rng(seed, StreamOp::RandomBaseline, u);
    CompensatedSum moderate, hardline, occurrences;
    std::size_t used = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        const auto subset = sample_random_friend_subset(u, fg, std::min(size, fg.friends(u).size()), rng);
        const auto p = class_fractions(exposure_pool(subset, log, table, window));
        if (!p) continue;
        moderate.add(p->frac_moderate);
        hardline.add(p->frac_hardline);
        occurrences.add(double(p->n_domain_occurrences));
        ++used;
    }
    if (used == 0) return std::nullopt;
    ExposureProfile out;
    out.user = u;
    out.kind = GraphKind::Follower;
    out.frac_moderate = moderate.value() / double(used);
    out.frac_hardline = hardline.value() / double(used);
    out.n_domain_occurrences = static_cast<std::size_t>(occurrences.value() / double(used) + 0.5);
    return out;
}

ActivityComparison friend_activity_comparison(const FollowerGraph& fg, const RetweetGraph& rg, const EventLog& log,
                                              std::span<const std::optional<double>> user_ms, std::uint32_t k,
                                              const Window& window) {
    const std::size_t n = std::max({fg.user_count(), rg.user_count(), user_ms.size()});
    std::vector<char> is_friend(n, 0), retweeted(n, 0);
    for (auto s : fg.seeds())
        for (auto f : fg.friends(s)) {
            is_friend[f] = 1;
            if (rg.weight(s, f) >= k) retweeted[f] = 1;
        }

    ActivityComparison out;
    for (UserId f = 0; f < n; ++f) {
        if (!is_friend[f]) continue;
        std::uint64_t activity = 0;
        for (auto pos : log.positions_of(f)) activity += window.contains(log.events()[pos].timestamp) ? 1 : 0;
        std::optional<ModeracyClass> cls;
        if (f < user_ms.size() && user_ms[f]) cls = classify(*user_ms[f]);
        out.friends.push_back({f, activity, retweeted[f] != 0, cls});
        if (retweeted[f]) {
            out.retweeted.push_back(double(activity));
            if (cls == ModeracyClass::Moderate) out.retweeted_moderate.push_back(double(activity));
            if (cls == ModeracyClass::Hardliner) out.retweeted_hardline.push_back(double(activity));
        } else {
            out.not_retweeted.push_back(double(activity));
        }
    }
    if (!out.retweeted.empty() && !out.not_retweeted.empty())
        out.retweeted_vs_not = mann_whitney_u(out.retweeted, out.not_retweeted);
    if (!out.retweeted_hardline.empty() && !out.retweeted_moderate.empty())
        out.hardline_vs_moderate = mann_whitney_u(out.retweeted_hardline, out.retweeted_moderate);
    return out;
}

std::optional<CongruenceDiff> congruent_friend_fraction_diff(UserId u, const FollowerGraph& fg,
                                                             const RetweetGraph& rg,
                                                             std::span<const std::optional<double>> user_ms,
                                                             std::uint32_t k) {
    if (u >= user_ms.size() || !user_ms[u]) return std::nullopt;
    const auto cls = classify(*user_ms[u]);
    std::size_t rt = 0, rt_same = 0, other = 0, other_same = 0;
    for (auto f : fg.friends(u)) {
        if (f >= user_ms.size() || !user_ms[f]) continue;
        const bool same = classify(*user_ms[f]) == cls;
        if (rg.weight(u, f) >= k) {
            ++rt;
            rt_same += same;
        } else {
            ++other;
            other_same += same;
        }
    }
    if (rt == 0 || other == 0) return std::nullopt;
    CongruenceDiff d;
    d.user = u;
    d.cls = cls;
    d.frac_congruent_retweeted = double(rt_same) / double(rt);
    d.frac_congruent_not_retweeted = double(other_same) / double(other);
    d.diff = d.frac_congruent_retweeted - d.frac_congruent_not_retweeted;
    d.n_retweeted = rt;
    d.n_not_retweeted = other;
    return d;
}

}  // namespace echoscope
