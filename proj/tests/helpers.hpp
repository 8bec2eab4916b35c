#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "echoscope/ingest.hpp"

namespace testing {

/// Bundle from inline CSV/JSONL text. Seeds default to edge followers.
inline echoscope::DatasetBundle bundle_from(const std::string& scores, const std::string& edges,
                                            const std::string& events, const std::string& seeds = {}) {
    using namespace echoscope;
    DatasetBundle b;
    std::istringstream s(scores), e(edges), v(events);
    b.scores = parse_domain_scores(s);
    b.edges = parse_follow_edges(e, b.users);
    if (!seeds.empty()) {
        std::istringstream in(seeds);
        std::string name;
        while (in >> name) b.seeds.push_back(b.users.intern(name));
        std::sort(b.seeds.begin(), b.seeds.end());
        b.seeds.erase(std::unique(b.seeds.begin(), b.seeds.end()), b.seeds.end());
    } else {
        for (const auto& [a, _] : b.edges.edges)
            if (b.seeds.empty() || b.seeds.back() != a) b.seeds.push_back(a);
    }
    b.log = parse_events(v, b.users);
    return b;
}

inline std::string original(const std::string& id, const std::string& author, long ts,
                            const std::string& url = "") {
    std::string urls = url.empty() ? "[]" : "[\"" + url + "\"]";
    return "{\"id\":\"" + id + "\",\"author\":\"" + author + "\",\"ts\":" + std::to_string(ts) +
           ",\"kind\":\"original\",\"urls\":" + urls + "}\n";
}

inline std::string retweet(const std::string& id, const std::string& author, long ts, const std::string& orig,
                           const std::string& url = "") {
    std::string urls = url.empty() ? "[]" : "[\"" + url + "\"]";
    return "{\"id\":\"" + id + "\",\"author\":\"" + author + "\",\"ts\":" + std::to_string(ts) +
           ",\"kind\":\"retweet\",\"orig_author\":\"" + orig + "\",\"urls\":" + urls + "}\n";
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("echoscope-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

}  // namespace testing
