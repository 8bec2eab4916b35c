#pragma once

// Binary graph cache. All integers little-endian.
//
//   offset  size  field
//   0       8     magic "ECHOGRPH"
//   8       4     format version (u32, currently 1)
//   12      8     input fingerprint (u64, FNV-1a over the edge, event and seed files)
//   20      ...   user table:     u64 count, then per user u32 length + UTF-8 bytes (id order)
//           ...   follower graph: u32 array seeds, u64 array offsets, u32 array targets, u64 array indegree
//           ...   retweet graph:  u32 array seeds, u64 array offsets,
//                                 edge array (u64 count, then u32 target + u32 count), u64 array indegree
//
// Every array is a u64 element count followed by the elements.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "echoscope/graph.hpp"
#include "echoscope/ingest.hpp"

namespace echoscope {

inline constexpr std::uint32_t kGraphCacheVersion = 1;

struct GraphCache {
    std::uint64_t fingerprint = 0;
    UserRegistry users;
    FollowerGraph follower;
    RetweetGraph retweet;
};

/// FNV-1a 64 over the given files' bytes, each followed by a separator.
std::uint64_t fingerprint_files(const std::vector<std::filesystem::path>& files);

void save_graph_cache(const std::filesystem::path& path, const GraphCache& cache);

/// Nothing when the file is missing, malformed, of another version or
/// built from different inputs.
std::optional<GraphCache> load_graph_cache(const std::filesystem::path& path, std::uint64_t expected_fingerprint);

}  // namespace echoscope
