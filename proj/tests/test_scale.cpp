#include <doctest.h>

#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>

#include "echoscope/graph.hpp"
#include "echoscope/rng.hpp"
#include "helpers.hpp"

using namespace echoscope;

namespace {

constexpr std::size_t kPaperEdges = 17'000'000;
constexpr double kMemoryBudgetMb = 2048.0;

// Edge file shaped like a crawl: a few thousand seeds, each following
// several thousand accounts drawn from a larger population.
void write_edge_file(const std::filesystem::path& path, std::size_t n_edges) {
    std::ofstream out(path, std::ios::binary);
    std::vector<char> buf(1 << 20);
    out.rdbuf()->pubsetbuf(buf.data(), static_cast<std::streamsize>(buf.size()));
    out << "follower,friend\n";
    Stream rng(17, StreamOp::Test, 100);
    const std::size_t seeds = 5000, population = 2'000'000;
    char line[48];
    for (std::size_t i = 0; i < n_edges; ++i) {
        const auto s = i % seeds;
        const auto f = rng.below(population);
        const int n = std::snprintf(line, sizeof line, "s%zu,a%zu\n", s, f);
        out.write(line, n);
    }
}

double best_seconds(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

}  // namespace

TEST_CASE("17M-edge follow list parses within the memory budget") {
    const auto dir = testing::scratch("scale-parse");
    const auto path = dir / "edges.csv";
    write_edge_file(path, kPaperEdges);

    // Parse in a child so its peak RSS is measured in isolation.
    const pid_t pid = fork();
    REQUIRE(pid >= 0);
    if (pid == 0) {
        UserRegistry users;
        const auto edges = parse_follow_edges(path, users);
        const auto fg = FollowerGraph::build(edges, std::vector<UserId>{0}, users.size());
        _exit(edges.edges.size() + edges.duplicates == kPaperEdges ? 0 : 3);
    }
    int status = 0;
    rusage usage{};
    REQUIRE(wait4(pid, &status, 0, &usage) == pid);
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
    const double peak_mb = double(usage.ru_maxrss) / 1024.0;
    MESSAGE("peak RSS parsing " << kPaperEdges << " edges: " << peak_mb << " MB");
    CHECK(peak_mb < kMemoryBudgetMb);
    std::filesystem::remove_all(dir);
}

TEST_CASE("graph build time grows linearly with edge count") {
    // Fit log(time) against log(edges) over 10^4, 10^5, 10^6 edges; a linear
    // build has slope 1. Cache effects at the top size push it up a little,
    // so the bound leaves room without admitting n log n blowups of the
    // constant factor or anything quadratic.
    std::vector<double> lx, ly;
    for (std::size_t n : {10'000u, 100'000u, 1'000'000u}) {
        FollowEdgeList edges;
        Stream rng(3, StreamOp::Test, n);
        const std::size_t seeds = std::max<std::size_t>(n / 200, 1);
        const std::size_t users = n / 2 + seeds;
        for (std::size_t i = 0; i < n; ++i)
            edges.edges.emplace_back(UserId(i % seeds), UserId(seeds + rng.below(users - seeds)));
        std::sort(edges.edges.begin(), edges.edges.end());
        edges.edges.erase(std::unique(edges.edges.begin(), edges.edges.end()), edges.edges.end());
        std::vector<UserId> seed_ids(seeds);
        std::iota(seed_ids.begin(), seed_ids.end(), 0);
        const double t = best_seconds(n >= 1'000'000 ? 3 : 9, [&] {
            const auto g = FollowerGraph::build(edges, seed_ids, users);
            CHECK(g.edge_count() == edges.edges.size());
        });
        MESSAGE(n << " edges: " << t * 1e3 << " ms");
        lx.push_back(std::log(double(n)));
        ly.push_back(std::log(t));
    }
    const double slope = (ly[2] - ly[0]) / (lx[2] - lx[0]);
    MESSAGE("log-log slope " << slope);
    CHECK(slope < 1.3);
}
