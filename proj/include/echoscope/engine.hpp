#pragma once

// Dataset-wide metric kernels. Every kernel has two execution paths:
// Parallel aggregates per-author pools once and fans users out over
// OpenMP threads; Serial runs the per-user reference operations from
// moderacy.hpp one user at a time. Both must agree.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "echoscope/graph.hpp"
#include "echoscope/ingest.hpp"
#include "echoscope/moderacy.hpp"
#include "echoscope/stats.hpp"

namespace echoscope {

enum class Execution { Serial, Parallel };

struct MetricsTable {
    std::uint32_t k = 1;
    /// One row per seed, ascending by id.
    std::vector<UserMetrics> seeds;
    /// Pre-fold mean and normalized m_s for every user id (seeds and friends).
    std::vector<std::optional<double>> user_mu;
    std::vector<std::optional<double>> user_ms;
    std::optional<Normalization> ms_norm;
    std::optional<Normalization> me_norm;
};

struct EntropyProfile {
    UserId user = kNoUser;
    GraphKind kind = GraphKind::Follower;
    double entropy = 0.0;
    std::size_t n_bins = 0;
    std::size_t n_friends_scored = 0;
};

struct EntropyComparison {
    std::vector<EntropyProfile> follower;
    std::vector<EntropyProfile> retweet;  // paired with `follower` by index
    std::size_t skipped = 0;
    std::optional<UTestResult> test;      // follower population vs retweet population
};

class Engine {
public:
    Engine(const DatasetBundle& bundle, const FollowerGraph& fg, const RetweetGraph& rg, Window window = {},
           bool unique_domains = false);

    /// m_s for all users, m_e via both graph kinds for every seed, jointly
    /// normalized exposures, deltas and classes at retweet threshold k.
    MetricsTable metrics(std::uint32_t k, Execution exec = Execution::Parallel) const;

    /// Per-seed exposure class fractions; entries align with fg.seeds().
    std::vector<std::optional<ExposureProfile>> class_fractions(GraphKind kind, std::uint32_t k,
                                                                Execution exec = Execution::Parallel) const;

    /// Random follower-friend baseline for `users`, aligned with it.
    std::vector<std::optional<ExposureProfile>> random_baseline(std::span<const UserId> users, std::uint32_t k,
                                                                std::size_t reps, std::uint64_t seed,
                                                                Execution exec = Execution::Parallel) const;

    const Window& window() const { return window_; }
    bool unique_domains() const { return unique_; }
    const FollowerGraph& follower_graph() const { return fg_; }
    const RetweetGraph& retweet_graph() const { return rg_; }
    const DatasetBundle& bundle() const { return bundle_; }

private:
    struct AuthorPool {
        CompensatedSum sum;
        std::uint64_t count = 0;
        std::uint64_t moderate = 0;
        std::vector<std::uint32_t> distinct;  // sorted scored domain ids (unique mode only)
    };

    void individual_parallel(std::vector<std::optional<IndividualModeracy>>& out) const;
    void individual_serial(std::vector<std::optional<IndividualModeracy>>& out) const;
    std::optional<double> pooled_mean(std::span<const UserId> friends, std::vector<std::uint32_t>& stamp,
                                      std::uint32_t tag) const;

    const DatasetBundle& bundle_;
    const FollowerGraph& fg_;
    const RetweetGraph& rg_;
    Window window_;
    bool unique_;

    std::vector<double> domain_score_;              // by domain id
    std::vector<std::uint64_t> event_offsets_;      // CSR: scored domain ids per event
    std::vector<std::uint32_t> event_domains_;
    std::vector<AuthorPool> pools_;                 // by author id, within window
    std::size_t user_count_ = 0;
};

/// Entropy of scored-friend m_s under both graph kinds for users with at
/// least two scored friends in each, plus a Mann-Whitney test between the
/// two entropy populations.
EntropyComparison entropy_comparison(std::span<const UserId> users, const FollowerGraph& fg,
                                     const RetweetGraph& rg, std::span<const std::optional<double>> user_ms,
                                     std::uint32_t k, std::size_t n_bins, Execution exec = Execution::Parallel);

/// Sets the OpenMP worker count (0 keeps the runtime default).
void set_thread_count(int threads);

}  // namespace echoscope
