#pragma once

// Brute-force recomputation of per-user metrics straight from the parsed
// bundle, by user name and full scans of the edge list and event log. It
// shares no code with the engine, graph or moderacy modules.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "echoscope/common.hpp"
#include "echoscope/engine.hpp"
#include "echoscope/ingest.hpp"

namespace echoscope {

struct OracleOptions {
    std::vector<std::uint32_t> ks{1, 2, 3};
    Window window{};
    bool unique_domains = false;
    std::size_t entropy_bins = 5;
    std::size_t max_events = 1000;
};

/// Metric name -> value (nothing = absent). Names look like
/// "m_e_r[k=2][u07]" so a mismatch report points at one number.
using MetricMap = std::map<std::string, std::optional<double>>;

/// Throws InputError when the log exceeds `max_events`.
MetricMap oracle_metrics(const DatasetBundle& bundle, const OracleOptions& options);

/// The same metric names computed through the engine.
MetricMap engine_metrics(const DatasetBundle& bundle, const OracleOptions& options,
                         Execution exec = Execution::Parallel);

struct OracleComparison {
    std::size_t compared = 0;
    std::size_t absent_both = 0;
    std::vector<std::string> presence_mismatches;
    double max_abs_diff = 0.0;
    std::string worst_metric;

    bool passed(double tolerance) const { return presence_mismatches.empty() && max_abs_diff <= tolerance; }
};

OracleComparison compare_metrics(const MetricMap& engine, const MetricMap& oracle);

}  // namespace echoscope
