#include <doctest.h>

#include <chrono>
#include <map>
#include <set>

#include "echoscope/graph.hpp"
#include "echoscope/synth.hpp"
#include "helpers.hpp"

using namespace echoscope;
using testing::original;
using testing::retweet;

namespace {

UserId id(const DatasetBundle& b, const char* name) { return *b.users.find(name); }

std::set<std::string> names(const DatasetBundle& b, std::span<const UserId> ids) {
    std::set<std::string> out;
    for (auto u : ids) out.insert(b.users.name(u));
    return out;
}

}  // namespace

TEST_CASE("follower graph is restricted to seed rows") {
    const auto b = testing::bundle_from("domain,score\nx.com,0\n", "follower,friend\ns1,a\ns1,b\nx,a\n", "", "s1");
    const auto fg = FollowerGraph::build(b.edges, b.seeds, b.users.size());
    CHECK(names(b, fg.friends(id(b, "s1"))) == std::set<std::string>{"a", "b"});
    CHECK(fg.friends(id(b, "x")).empty());
    CHECK(fg.indegree(id(b, "a")) == 1);
    CHECK(fg.indegree(id(b, "b")) == 1);
    CHECK(fg.follows(id(b, "s1"), id(b, "a")));
    CHECK_FALSE(fg.follows(id(b, "x"), id(b, "a")));
}

TEST_CASE("seed without edges keeps an empty row") {
    const auto b = testing::bundle_from("domain,score\nx.com,0\n", "follower,friend\ns1,a\n", "", "s1 s2");
    const auto fg = FollowerGraph::build(b.edges, b.seeds, b.users.size());
    CHECK(fg.seeds().size() == 2);
    CHECK(fg.friends(id(b, "s2")).empty());
    CHECK_THROWS_AS(FollowerGraph::build(b.edges, {}, b.users.size()), InputError);
}

TEST_CASE("retweet weights count retweet events from seeds") {
    std::string ev;
    for (int i = 0; i < 3; ++i) ev += retweet("ra" + std::to_string(i), "s", 10 + i, "A");
    ev += retweet("rb", "s", 20, "B");
    ev += retweet("rx", "n", 21, "A");  // n is not a seed
    ev += original("o", "s", 22);
    const auto b = testing::bundle_from("domain,score\nx.com,0\n", "follower,friend\ns,A\n", ev, "s");
    const auto rg = RetweetGraph::build(b.log, b.seeds, b.users.size());
    const auto s = id(b, "s"), A = id(b, "A"), B = id(b, "B");
    CHECK(rg.weight(s, A) == 3);
    CHECK(rg.weight(s, B) == 1);
    CHECK(rg.edges(id(b, "n")).empty());
    CHECK(rg.indegree(A) == 3);
    CHECK(names(b, rg.friends(s, 2)) == std::set<std::string>{"A"});
    const auto r2 = rg.thresholded(2);
    CHECK(r2.edges(s).size() == 1);
    CHECK(r2.weight(s, A) == 3);
    CHECK(r2.indegree(B) == 0);
}

TEST_CASE("brute-force retweet recount and threshold nesting on synthetic data") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        SynthConfig cfg;
        cfg.n_users = 40;
        cfg.activity_rate = 8;
        cfg.retweet_rate = 6;
        cfg.reshare_fraction = 0.3;
        cfg.seed = seed;
        const auto data = generate(cfg);
        const auto& b = data.bundle;
        REQUIRE(b.log.size() <= 1000);
        const auto rg = RetweetGraph::build(b.log, b.seeds, b.users.size());

        std::map<std::pair<UserId, UserId>, std::uint32_t> brute;
        std::set<UserId> seeds(b.seeds.begin(), b.seeds.end());
        for (const auto& e : b.log.events())
            if (e.kind == EventKind::Retweet && seeds.count(e.author)) ++brute[{e.author, *e.original_author}];
        std::size_t total = 0;
        for (auto s : b.seeds)
            for (const auto& e : rg.edges(s)) {
                CHECK(brute[{s, e.target}] == e.count);
                ++total;
            }
        CHECK(total == brute.size());

        for (std::uint32_t k = 1; k < 10; ++k)
            for (auto s : b.seeds) {
                const auto hi = rg.friends(s, k + 1);
                const auto lo = rg.friends(s, k);
                CHECK(std::includes(lo.begin(), lo.end(), hi.begin(), hi.end()));
            }

        // Repeated builds are identical.
        CHECK(rg == RetweetGraph::build(b.log, b.seeds, b.users.size()));
        const auto fg = FollowerGraph::build(b.edges, b.seeds, b.users.size());
        CHECK(fg == FollowerGraph::build(b.edges, b.seeds, b.users.size()));

        for (auto s : b.seeds)
            for (auto mode : {OverlapMode::Account, OverlapMode::Content}) {
                if (auto o = retweet_overlap(s, fg, rg, 1, mode)) {
                    CHECK(*o >= 0.0);
                    CHECK(*o <= 1.0);
                }
                if (auto f = fraction_friends_retweeted(s, fg, rg, 1)) {
                    CHECK(*f >= 0.0);
                    CHECK(*f <= 1.0);
                }
            }
    }
}

TEST_CASE("fraction of friends retweeted") {
    std::string edges = "follower,friend\n";
    for (int i = 0; i < 10; ++i) edges += "u,f" + std::to_string(i) + "\n";
    edges += "quiet,f0\n";
    const auto b = testing::bundle_from("domain,score\nx.com,0\n", edges, retweet("r", "u", 1, "f3"), "u quiet alone");
    const auto fg = FollowerGraph::build(b.edges, b.seeds, b.users.size());
    const auto rg = RetweetGraph::build(b.log, b.seeds, b.users.size());
    CHECK(fraction_friends_retweeted(id(b, "u"), fg, rg) == doctest::Approx(0.1));
    CHECK(fraction_friends_retweeted(id(b, "quiet"), fg, rg) == 0.0);
    CHECK_FALSE(fraction_friends_retweeted(id(b, "alone"), fg, rg));
}

TEST_CASE("overlap modes and thresholds") {
    // u follows a and b; retweets a 10x, c 10x (c unfollowed) -> half followed.
    // v follows a; retweets a 10x -> fully followed at every k.
    // w follows a; retweets a 2x and c once -> 0.5 at k=1, 1.0 at k=2.
    std::string ev;
    int n = 0;
    auto rt = [&](const char* who, const char* orig, int times) {
        for (int i = 0; i < times; ++i) ev += retweet("r" + std::to_string(n++), who, n, orig);
    };
    rt("u", "a", 10);
    rt("u", "c", 10);
    rt("v", "a", 10);
    rt("w", "a", 2);
    rt("w", "c", 1);
    const auto b = testing::bundle_from("domain,score\nx.com,0\n", "follower,friend\nu,a\nu,b\nv,a\nw,a\n", ev);
    const auto fg = FollowerGraph::build(b.edges, b.seeds, b.users.size());
    const auto rg = RetweetGraph::build(b.log, b.seeds, b.users.size());

    CHECK(retweet_overlap(id(b, "u"), fg, rg, 1, OverlapMode::Account) == 0.5);
    CHECK(retweet_overlap(id(b, "u"), fg, rg, 1, OverlapMode::Content) == 0.5);
    CHECK(retweet_overlap(id(b, "v"), fg, rg, 1, OverlapMode::Account) == 1.0);
    CHECK(retweet_overlap(id(b, "v"), fg, rg, 1, OverlapMode::Content) == 1.0);
    CHECK(retweet_overlap(id(b, "w"), fg, rg, 1, OverlapMode::Account) == 0.5);
    CHECK(retweet_overlap(id(b, "w"), fg, rg, 1, OverlapMode::Content) == doctest::Approx(2.0 / 3.0));
    CHECK(retweet_overlap(id(b, "w"), fg, rg, 2, OverlapMode::Account) == 1.0);
    CHECK_FALSE(retweet_overlap(id(b, "w"), fg, rg, 3, OverlapMode::Account));

    // None followed.
    const auto b2 = testing::bundle_from("domain,score\nx.com,0\n", "follower,friend\nu,a\n", retweet("r", "u", 1, "z"));
    const auto fg2 = FollowerGraph::build(b2.edges, b2.seeds, b2.users.size());
    const auto rg2 = RetweetGraph::build(b2.log, b2.seeds, b2.users.size());
    CHECK(retweet_overlap(id(b2, "u"), fg2, rg2, 1, OverlapMode::Account) == 0.0);
    CHECK(retweet_overlap(id(b2, "u"), fg2, rg2, 1, OverlapMode::Content) == 0.0);

    // Single user retweeting one followed account 10 times: flat curve.
    const auto b3 = testing::bundle_from("domain,score\nx.com,0\n", "follower,friend\nv,a\n", [&] {
        std::string e;
        for (int i = 0; i < 10; ++i) e += retweet("q" + std::to_string(i), "v", i, "a");
        return e;
    }());
    const auto fg3 = FollowerGraph::build(b3.edges, b3.seeds, b3.users.size());
    const auto rg3 = RetweetGraph::build(b3.log, b3.seeds, b3.users.size());
    std::vector<std::uint32_t> ks{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    for (auto mode : {OverlapMode::Account, OverlapMode::Content}) {
        const auto curve = overlap_vs_threshold(fg3, rg3, ks, mode);
        REQUIRE(curve.points.size() == 10);
        for (const auto& p : curve.points) {
            CHECK(p.mean_overlap == 1.0);
            CHECK(p.n_users == 1);
        }
    }
    const auto wc = overlap_vs_threshold(fg, rg, std::vector<std::uint32_t>{1, 2}, OverlapMode::Account);
    CHECK(wc.points[0].mean_overlap == doctest::Approx((0.5 + 1.0 + 0.5) / 3));
    CHECK(wc.points[1].mean_overlap == doctest::Approx((0.5 + 1.0 + 1.0) / 3));
}

TEST_CASE("homophilic synthetic runs: overlap grows with k") {
    // Averaged over seeded runs the curve is non-decreasing; individual runs
    // wobble once few users remain at high k, so per run only the endpoints
    // are compared.
    const int runs = 20;
    std::vector<std::uint32_t> ks{1, 2, 3, 4, 5};
    std::vector<double> mean(ks.size(), 0.0);
    int rising = 0;
    for (int r = 0; r < runs; ++r) {
        SynthConfig cfg;
        cfg.n_users = 150;
        cfg.reshare_fraction = 0.3;
        cfg.seed = 100 + r;
        const auto data = generate(cfg);
        const auto& b = data.bundle;
        const auto fg = FollowerGraph::build(b.edges, b.seeds, b.users.size());
        const auto rg = RetweetGraph::build(b.log, b.seeds, b.users.size());
        const auto curve = overlap_vs_threshold(fg, rg, ks, OverlapMode::Account);
        for (std::size_t i = 0; i < ks.size(); ++i) mean[i] += curve.points[i].mean_overlap / runs;
        rising += curve.points.back().mean_overlap > curve.points.front().mean_overlap;
    }
    for (std::size_t i = 1; i < ks.size(); ++i) CHECK(mean[i] >= mean[i - 1]);
    CHECK(rising == runs);
}

TEST_CASE("indegree sampling follows the 3:1 ratio") {
    std::vector<std::uint64_t> indeg{0, 3, 0, 1};
    Stream rng(11, StreamOp::Test, 1);
    const auto draws = sample_by_indegree(indeg, 400000, rng);
    std::size_t c1 = 0, c3 = 0;
    for (auto d : draws) {
        CHECK_FALSE((d != 1 && d != 3));
        c1 += d == 1;
        c3 += d == 3;
    }
    const double ratio = double(c1) / double(c3);
    CHECK(std::abs(ratio - 3.0) / 3.0 < 0.01);

    std::vector<std::uint64_t> single{0, 0, 7};
    for (auto d : sample_by_indegree(single, 1000, rng)) CHECK(d == 2);
    std::vector<std::uint64_t> none{0, 0};
    CHECK_THROWS_AS(sample_by_indegree(none, 10, rng), InputError);
}

TEST_CASE("random friend subsets") {
    std::string edges = "follower,friend\n";
    for (int i = 0; i < 8; ++i) edges += "u,f" + std::to_string(i) + "\n";
    const auto b = testing::bundle_from("domain,score\nx.com,0\n", edges, "");
    const auto fg = FollowerGraph::build(b.edges, b.seeds, b.users.size());
    const auto u = id(b, "u");
    Stream rng(5, StreamOp::Test, 2);
    const auto all = sample_random_friend_subset(u, fg, 8, rng);
    CHECK(std::vector<UserId>(fg.friends(u).begin(), fg.friends(u).end()) == all);
    CHECK(sample_random_friend_subset(u, fg, 0, rng).empty());
    CHECK(sample_random_friend_subset(u, fg, 20, rng).size() == 8);

    // Each friend appears in a size-2 subset with probability 1/4.
    std::map<UserId, int> hits;
    const int reps = 100000;
    for (int i = 0; i < reps; ++i) {
        const auto s = sample_random_friend_subset(u, fg, 2, rng);
        CHECK(s.size() == 2);
        CHECK(s[0] < s[1]);
        for (auto f : s) ++hits[f];
    }
    for (auto f : fg.friends(u)) CHECK(std::abs(double(hits[f]) / reps - 0.25) < 0.01);
}
