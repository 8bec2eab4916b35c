#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "echoscope/common.hpp"
#include "echoscope/graph.hpp"
#include "echoscope/ingest.hpp"
#include "echoscope/stats.hpp"

namespace echoscope {

enum class GraphKind { Follower, Retweet };
enum class ModeracyClass { Moderate, Hardliner };

std::string to_string(GraphKind kind);
std::string to_string(ModeracyClass cls);

/// Mean score of the scored occurrences; nothing when none is scored.
std::optional<double> raw_mean_score(std::span<const double> scores);
/// Looks each occurrence up in `table`; with `unique` each distinct
/// domain counts once.
std::optional<double> raw_mean_score(std::span<const std::string> domains, const DomainScoreTable& table,
                                     bool unique = false);

/// Reflects scores at or below 0.5 about 0.5: mu > 0.5 ? mu : 1 - mu.
double fold(double mu);
/// Folds an exposure mean using the user's own raw mean as the branch guard.
inline double fold_by(double raw, double guard) { return guard > 0.5 ? raw : 1.0 - raw; }

/// Min-max rescaling fitted on a population.
struct Normalization {
    double min = 0.0;
    double max = 1.0;
    bool degenerate = false;

    static Normalization fit(std::span<const double> values);
    double apply(double x) const { return degenerate ? 0.5 : (x - min) / (max - min); }
};

/// x -> (x - min) / (max - min); all 0.5 (with a warning) when max == min.
std::map<UserId, double> minmax_normalize(const std::map<UserId, double>& scores);

/// Moderate iff m_s <= 0.5.
ModeracyClass classify(double m_s);

struct IndividualModeracy {
    double mu;        // pre-fold mean
    double folded;    // before normalization
    std::size_t occurrences;
};

/// From domains in the user's original tweets only.
std::optional<IndividualModeracy> individual_moderacy(UserId u, const EventLog& log, const DomainScoreTable& table,
                                                      bool unique = false);

/// Follower friends, or retweet friends at threshold k.
std::vector<UserId> exposure_friends(UserId u, GraphKind kind, const FollowerGraph& fg, const RetweetGraph& rg,
                                     std::uint32_t k);

/// Scores of every scored domain occurrence posted by `friends` inside `window`.
std::vector<double> exposure_pool(std::span<const UserId> friends, const EventLog& log,
                                  const DomainScoreTable& table, const Window& window);

struct ExposureModeracy {
    double raw;
    double folded;
    std::size_t occurrences;
};

/// Activity-weighted exposure. Nothing when the user is unscored or the
/// pool is empty.
std::optional<ExposureModeracy> exposure_moderacy(UserId u, GraphKind kind, const FollowerGraph& fg,
                                                  const RetweetGraph& rg, const EventLog& log,
                                                  const DomainScoreTable& table, std::uint32_t k,
                                                  const Window& window, std::optional<double> user_mu,
                                                  bool unique = false);

/// m_e_f - m_e_r, nothing when either side is missing.
inline std::optional<double> exposure_delta(std::optional<double> me_f, std::optional<double> me_r) {
    if (!me_f || !me_r) return std::nullopt;
    return *me_f - *me_r;
}

struct UserMetrics {
    UserId user = kNoUser;
    std::optional<double> raw_mean;
    std::optional<double> folded;
    std::optional<double> m_s;
    std::optional<double> me_f_raw;
    std::optional<double> me_r_raw;
    std::optional<double> me_f_folded;
    std::optional<double> me_r_folded;
    std::optional<double> m_e_f;
    std::optional<double> m_e_r;
    std::optional<double> delta;
    std::size_t domain_count = 0;
    std::optional<ModeracyClass> cls;
};

struct ExposureProfile {
    UserId user = kNoUser;
    GraphKind kind = GraphKind::Follower;
    double frac_moderate = 0.0;
    double frac_hardline = 0.0;
    std::size_t n_domain_occurrences = 0;
};

/// Class of a single domain score: classify(fold(score)).
ModeracyClass classify_domain_score(double score);

/// Share of moderate and hardline occurrences in a pool; nothing when empty.
std::optional<ExposureProfile> class_fractions(std::span<const double> pool);

std::optional<ExposureProfile> exposure_class_fractions(UserId u, GraphKind kind, const FollowerGraph& fg,
                                                        const RetweetGraph& rg, const EventLog& log,
                                                        const DomainScoreTable& table, std::uint32_t k,
                                                        const Window& window);

/// Mean class fractions over `reps` random follower-friend subsets of
/// the size of u's retweet-friend set at k. Reps with an empty pool are
/// skipped; nothing when u has no retweet friend or every pool is empty.
std::optional<ExposureProfile> random_baseline_fractions(UserId u, const FollowerGraph& fg, const RetweetGraph& rg,
                                                         const EventLog& log, const DomainScoreTable& table,
                                                         std::uint32_t k, const Window& window, std::size_t reps,
                                                         std::uint64_t seed);

struct ActivityComparison {
    struct Friend {
        UserId user;
        std::uint64_t activity;
        bool retweeted;
        std::optional<ModeracyClass> cls;
    };
    /// Union of follower friends over seeds, ascending by id.
    std::vector<Friend> friends;
    std::vector<double> retweeted;
    std::vector<double> not_retweeted;
    std::vector<double> retweeted_moderate;
    std::vector<double> retweeted_hardline;
    std::optional<UTestResult> retweeted_vs_not;
    std::optional<UTestResult> hardline_vs_moderate;
};

/// Events per friend inside `window`, split by whether a seed following
/// the friend retweeted it at least k times. `user_ms` holds normalized
/// m_s per user id (for the per-class breakdown).
ActivityComparison friend_activity_comparison(const FollowerGraph& fg, const RetweetGraph& rg, const EventLog& log,
                                              std::span<const std::optional<double>> user_ms, std::uint32_t k,
                                              const Window& window);

struct CongruenceDiff {
    UserId user = kNoUser;
    ModeracyClass cls = ModeracyClass::Moderate;
    double frac_congruent_retweeted = 0.0;
    double frac_congruent_not_retweeted = 0.0;
    double diff = 0.0;
    std::size_t n_retweeted = 0;
    std::size_t n_not_retweeted = 0;
};

/// Share of scored retweeted follower friends in u's class minus the same
/// share among scored non-retweeted follower friends.
std::optional<CongruenceDiff> congruent_friend_fraction_diff(UserId u, const FollowerGraph& fg,
                                                             const RetweetGraph& rg,
                                                             std::span<const std::optional<double>> user_ms,
                                                             std::uint32_t k);

}  // namespace echoscope
