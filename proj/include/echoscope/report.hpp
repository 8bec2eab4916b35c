#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "echoscope/common.hpp"
#include "echoscope/graph.hpp"
#include "echoscope/ingest.hpp"

namespace echoscope {

inline constexpr const char* kVersion = "0.1.0";

enum class OverlapSelection { Account, Content, Both };
std::string to_string(OverlapSelection s);
OverlapSelection parse_overlap_selection(const std::string& text);

struct RunConfig {
    DatasetPaths paths;
    std::filesystem::path out_dir;
    std::uint32_t k_min = 1;
    std::uint32_t k_max = 10;
    std::size_t entropy_bins = 5;
    std::size_t reps = 1000;
    std::size_t baseline_users = 0;  // 0: every eligible seed
    std::size_t samples = 500000;
    std::size_t heatmap_bins = 25;
    Window window;
    std::uint64_t seed = 1;
    OverlapSelection overlap = OverlapSelection::Both;
    bool unique_domains = false;
    bool use_cache = true;
    int threads = 0;  // 0: runtime default; never affects output

    void validate() const;
    /// The output-relevant part of the configuration (no paths to outputs, no threads).
    nlohmann::ordered_json to_json() const;
    std::string hash() const;
};

struct LoadedDataset {
    DatasetBundle bundle;
    FollowerGraph follower;
    RetweetGraph retweet;
    bool cache_hit = false;
};

/// Parses the inputs and builds both graphs, reusing `cache_file` when it
/// matches the current edge/event/seed files.
LoadedDataset load_with_cache(const DatasetPaths& paths, const std::filesystem::path& cache_file, bool use_cache);

struct ReportSummary {
    std::size_t seeds = 0;
    std::size_t scored_seeds = 0;
    bool cache_hit = false;
    std::vector<std::string> files;
};

ReportSummary run_report(const RunConfig& config);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace echoscope
