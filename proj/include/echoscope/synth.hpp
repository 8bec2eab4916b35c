#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "echoscope/ingest.hpp"

namespace echoscope {

/// Parameters of the planted-homophily generator.
struct SynthConfig {
    std::size_t n_users = 200;
    std::size_t n_domains = 40;
    /// Length scale of ideology distance in the follow probability.
    double follow_homophily = 0.2;
    double base_follow_prob = 0.1;
    /// Attention kernel exp(-beta * |x_u - x_author|); 0 is uniform attention.
    double attention_bias = 5.0;
    /// Mean original tweets per user (before the activity multiplier).
    double activity_rate = 20.0;
    /// Mean retweets per user (before the activity multiplier).
    double retweet_rate = 10.0;
    /// Share of retweets that re-share a friend's retweet (edge goes to the original author).
    double reshare_fraction = 0.0;
    /// Log-normal sigma of the per-user activity multiplier (mean one).
    double activity_sigma = 0.8;
    /// Standard deviation of shared-domain scores around the author's ideology.
    double ideology_noise = 0.15;
    double url_prob = 0.9;
    double unscored_url_prob = 0.05;
    std::int64_t start_time = 1398902400;  // 2014-05-01T00:00:00Z
    std::int64_t duration = 30 * 86400;
    std::uint64_t seed = 1;

    /// Throws InputError for invalid or infeasible settings.
    void validate() const;
    nlohmann::ordered_json to_json() const;
};

/// key=value lines; '#' starts a comment. Unknown keys are errors.
SynthConfig parse_synth_config(const std::filesystem::path& path);
SynthConfig parse_synth_config_text(const std::string& text);

struct GroundTruth {
    /// Planted ideology per user id.
    std::vector<double> ideology;
    DomainScoreTable domain_scores;
    bool null_model = false;
};

struct SynthDataset {
    DatasetBundle bundle;
    GroundTruth truth;
};

/// Deterministic in the config (including its seed) and independent of
/// the OpenMP thread count.
SynthDataset generate(const SynthConfig& config);

/// Writes scores.csv, edges.csv, events.jsonl, seeds.txt and truth.json.
void write_synth(const std::filesystem::path& dir, const SynthDataset& data, const SynthConfig& config);

DatasetPaths synth_paths(const std::filesystem::path& dir);

}  // namespace echoscope
