#include "echoscope/graph.hpp"

#include <algorithm>
#include <numeric>

#include "echoscope/log.hpp"

namespace echoscope {

namespace {

std::vector<UserId> normalized_seeds(std::span<const UserId> seeds) {
    std::vector<UserId> out(seeds.begin(), seeds.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::size_t span_users(std::size_t user_count, std::span<const UserId> seeds) {
    for (auto s : seeds) user_count = std::max<std::size_t>(user_count, s + 1);
    return user_count;
}

}  // namespace

std::string to_string(OverlapMode mode) { return mode == OverlapMode::Account ? "account" : "content"; }

// ---------------------------------------------------------------- follower

FollowerGraph FollowerGraph::build(const FollowEdgeList& edges, std::span<const UserId> seeds,
                                   std::size_t user_count) {
    if (seeds.empty()) throw InputError("follower graph needs at least one seed");
    FollowerGraph g;
    g.seeds_ = normalized_seeds(seeds);
    for (const auto& [a, b] : edges.edges) user_count = std::max<std::size_t>(user_count, std::max(a, b) + 1);
    user_count = span_users(user_count, g.seeds_);

    std::vector<char> is_seed(user_count, 0);
    for (auto s : g.seeds_) is_seed[s] = 1;

    g.offsets_.assign(user_count + 1, 0);
    g.indegree_.assign(user_count, 0);
    for (const auto& [a, b] : edges.edges) {
        if (a == b || !is_seed[a]) continue;
        ++g.offsets_[a + 1];
    }
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    g.targets_.resize(g.offsets_.back());
    // Input edges are sorted by (follower, friend), so rows come out sorted.
    std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [a, b] : edges.edges) {
        if (a == b || !is_seed[a]) continue;
        g.targets_[cursor[a]++] = b;
        ++g.indegree_[b];
    }
    for (auto s : g.seeds_) {
        auto row = std::span<UserId>(g.targets_).subspan(g.offsets_[s], g.offsets_[s + 1] - g.offsets_[s]);
        if (!std::is_sorted(row.begin(), row.end())) std::sort(row.begin(), row.end());
    }
    return g;
}

std::span<const UserId> FollowerGraph::friends(UserId u) const {
    if (u + 1 >= offsets_.size()) return {};
    return std::span<const UserId>(targets_).subspan(offsets_[u], offsets_[u + 1] - offsets_[u]);
}

bool FollowerGraph::follows(UserId u, UserId v) const {
    const auto row = friends(u);
    return std::binary_search(row.begin(), row.end(), v);
}

// ----------------------------------------------------------------- retweet

RetweetGraph RetweetGraph::build(const EventLog& log, std::span<const UserId> seeds, std::size_t user_count) {
    RetweetGraph g;
    g.seeds_ = normalized_seeds(seeds);
    user_count = span_users(user_count, g.seeds_);
    for (const auto& e : log.events()) {
        user_count = std::max<std::size_t>(user_count, e.author + 1);
        if (e.original_author) user_count = std::max<std::size_t>(user_count, *e.original_author + 1);
    }
    g.offsets_.assign(user_count + 1, 0);
    g.indegree_.assign(user_count, 0);

    std::vector<UserId> targets;
    for (auto s : g.seeds_) {
        targets.clear();
        for (auto pos : log.positions_of(s)) {
            const auto& e = log.events()[pos];
            if (e.kind == EventKind::Retweet && e.original_author && *e.original_author != s)
                targets.push_back(*e.original_author);
        }
        std::sort(targets.begin(), targets.end());
        for (std::size_t i = 0; i < targets.size();) {
            std::size_t j = i;
            while (j < targets.size() && targets[j] == targets[i]) ++j;
            g.edges_.push_back({targets[i], static_cast<std::uint32_t>(j - i)});
            g.indegree_[targets[i]] += j - i;
            i = j;
        }
        g.offsets_[s + 1] = g.edges_.size();
    }
    // Fill offsets for users without rows.
    for (std::size_t u = 1; u <= user_count; ++u) g.offsets_[u] = std::max(g.offsets_[u], g.offsets_[u - 1]);
    return g;
}

std::span<const WeightedEdge> RetweetGraph::edges(UserId u) const {
    if (u + 1 >= offsets_.size()) return {};
    return std::span<const WeightedEdge>(edges_).subspan(offsets_[u], offsets_[u + 1] - offsets_[u]);
}

std::vector<UserId> RetweetGraph::friends(UserId u, std::uint32_t k) const {
    std::vector<UserId> out;
    for (const auto& e : edges(u))
        if (e.count >= k) out.push_back(e.target);
    return out;
}

std::uint32_t RetweetGraph::weight(UserId u, UserId v) const {
    const auto row = edges(u);
    auto it = std::lower_bound(row.begin(), row.end(), v,
                               [](const WeightedEdge& e, UserId t) { return e.target < t; });
    return it != row.end() && it->target == v ? it->count : 0;
}

RetweetGraph RetweetGraph::thresholded(std::uint32_t k) const {
    RetweetGraph g;
    g.seeds_ = seeds_;
    g.offsets_.assign(offsets_.size(), 0);
    g.indegree_.assign(indegree_.size(), 0);
    for (std::size_t u = 0; u + 1 < offsets_.size(); ++u) {
        for (const auto& e : edges(static_cast<UserId>(u))) {
            if (e.count < k) continue;
            g.edges_.push_back(e);
            g.indegree_[e.target] += e.count;
        }
        g.offsets_[u + 1] = g.edges_.size();
    }
    return g;
}

// ----------------------------------------------------------------- overlap

std::optional<double> fraction_friends_retweeted(UserId u, const FollowerGraph& fg, const RetweetGraph& rg,
                                                 std::uint32_t k) {
    const auto friends = fg.friends(u);
    if (friends.empty()) return std::nullopt;
    std::size_t hit = 0;
    for (auto f : friends)
        if (rg.weight(u, f) >= k) ++hit;
    return double(hit) / double(friends.size());
}

std::optional<double> retweet_overlap(UserId u, const FollowerGraph& fg, const RetweetGraph& rg,
                                      std::uint32_t k, OverlapMode mode) {
    std::uint64_t total = 0, followed = 0;
    for (const auto& e : rg.edges(u)) {
        if (e.count < k) continue;
        const std::uint64_t w = mode == OverlapMode::Account ? 1 : e.count;
        total += w;
        if (fg.follows(u, e.target)) followed += w;
    }
    if (total == 0) return std::nullopt;
    return double(followed) / double(total);
}

OverlapCurve overlap_vs_threshold(const FollowerGraph& fg, const RetweetGraph& rg,
                                  std::span<const std::uint32_t> ks, OverlapMode mode) {
    OverlapCurve curve;
    curve.mode = mode;
    for (auto k : ks) {
        CompensatedSum sum;
        std::size_t n = 0;
        for (auto u : fg.seeds()) {
            if (auto v = retweet_overlap(u, fg, rg, k, mode)) {
                sum.add(*v);
                ++n;
            }
        }
        curve.points.push_back({k, n == 0 ? 0.0 : sum.value() / double(n), n});
    }
    return curve;
}

// ---------------------------------------------------------------- sampling

std::vector<UserId> sample_by_indegree(std::span<const std::uint64_t> indegree, std::size_t n, Stream& rng) {
    std::vector<UserId> ids;
    std::vector<std::uint64_t> cumulative;
    std::uint64_t total = 0;
    for (std::size_t u = 0; u < indegree.size(); ++u) {
        if (indegree[u] == 0) continue;
        total += indegree[u];
        ids.push_back(static_cast<UserId>(u));
        cumulative.push_back(total);
    }
    if (total == 0) throw InputError("indegree sampling: all indegrees are zero");
    std::vector<UserId> out(n);
    for (auto& draw : out) {
        const auto x = rng.below(total);
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
        draw = ids[static_cast<std::size_t>(it - cumulative.begin())];
    }
    return out;
}

std::vector<UserId> sample_random_friend_subset(UserId u, const FollowerGraph& fg, std::size_t size, Stream& rng) {
    const auto friends = fg.friends(u);
    if (size > friends.size()) {
        spdlog::warn("friend subset of size {} requested from {} friends; clamping", size, friends.size());
        size = friends.size();
    }
    std::vector<UserId> pool(friends.begin(), friends.end());
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < size; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(size);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace echoscope
