#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "echoscope/common.hpp"
#include "echoscope/ingest.hpp"
#include "echoscope/rng.hpp"

namespace echoscope {

/// Seed -> friend adjacency in CSR form. Rows of non-seeds are empty.
class FollowerGraph {
public:
    FollowerGraph() = default;
    static FollowerGraph build(const FollowEdgeList& edges, std::span<const UserId> seeds,
                               std::size_t user_count);

    std::span<const UserId> friends(UserId u) const;
    bool follows(UserId u, UserId v) const;
    /// Number of seeds following `u`.
    std::uint64_t indegree(UserId u) const { return u < indegree_.size() ? indegree_[u] : 0; }
    std::span<const std::uint64_t> indegrees() const { return indegree_; }

    const std::vector<UserId>& seeds() const { return seeds_; }
    std::size_t user_count() const { return indegree_.size(); }
    std::size_t edge_count() const { return targets_.size(); }

    bool operator==(const FollowerGraph&) const = default;

private:
    friend struct GraphCacheAccess;
    std::vector<UserId> seeds_;
    std::vector<std::uint64_t> offsets_;
    std::vector<UserId> targets_;
    std::vector<std::uint64_t> indegree_;
};

struct WeightedEdge {
    UserId target;
    std::uint32_t count;
    bool operator==(const WeightedEdge&) const = default;
};

/// Seed -> retweeted account, weighted by the number of retweet events.
class RetweetGraph {
public:
    RetweetGraph() = default;
    static RetweetGraph build(const EventLog& log, std::span<const UserId> seeds, std::size_t user_count);

    /// Outgoing edges of `u` sorted by target.
    std::span<const WeightedEdge> edges(UserId u) const;
    /// Accounts retweeted at least `k` times by `u`, ascending.
    std::vector<UserId> friends(UserId u, std::uint32_t k = 1) const;
    std::uint32_t weight(UserId u, UserId v) const;
    /// Total retweets received from seeds.
    std::uint64_t indegree(UserId u) const { return u < indegree_.size() ? indegree_[u] : 0; }
    std::span<const std::uint64_t> indegrees() const { return indegree_; }

    /// Copy keeping only edges with count >= k; indegrees are recomputed.
    RetweetGraph thresholded(std::uint32_t k) const;

    const std::vector<UserId>& seeds() const { return seeds_; }
    std::size_t user_count() const { return indegree_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    bool operator==(const RetweetGraph&) const = default;

private:
    friend struct GraphCacheAccess;
    std::vector<UserId> seeds_;
    std::vector<std::uint64_t> offsets_;
    std::vector<WeightedEdge> edges_;
    std::vector<std::uint64_t> indegree_;
};

enum class OverlapMode { Account, Content };
std::string to_string(OverlapMode mode);

/// |friends(u) ∩ retweet_friends(u,k)| / |friends(u)|; nothing when u has no friends.
std::optional<double> fraction_friends_retweeted(UserId u, const FollowerGraph& fg, const RetweetGraph& rg,
                                                 std::uint32_t k = 1);

/// Account mode: share of retweet friends at k that are followed.
/// Content mode: share of u's retweets of accounts with weight >= k whose
/// original author is followed. Nothing when u has no retweet friend at k.
std::optional<double> retweet_overlap(UserId u, const FollowerGraph& fg, const RetweetGraph& rg,
                                      std::uint32_t k, OverlapMode mode);

struct OverlapCurve {
    struct Point {
        std::uint32_t k;
        double mean_overlap;
        std::size_t n_users;
    };
    OverlapMode mode = OverlapMode::Account;
    std::vector<Point> points;
};

/// Mean overlap per k over seeds that still have a retweet friend at k.
OverlapCurve overlap_vs_threshold(const FollowerGraph& fg, const RetweetGraph& rg,
                                  std::span<const std::uint32_t> ks, OverlapMode mode);

/// n draws with replacement, probability proportional to indegree.
std::vector<UserId> sample_by_indegree(std::span<const std::uint64_t> indegree, std::size_t n, Stream& rng);

template <class Graph>
std::vector<UserId> sample_friends_by_indegree(const Graph& g, std::size_t n, Stream& rng) {
    return sample_by_indegree(g.indegrees(), n, rng);
}

/// Uniform sample without replacement of `size` friends of `u`, ascending.
/// Sizes above the friend count are clamped with a warning.
std::vector<UserId> sample_random_friend_subset(UserId u, const FollowerGraph& fg, std::size_t size, Stream& rng);

}  // namespace echoscope
