#include <doctest.h>

#include <cmath>

#include "echoscope/engine.hpp"
#include "echoscope/synth.hpp"
#include "helpers.hpp"

using namespace echoscope;
using testing::original;
using testing::retweet;

namespace {

struct Built {
    DatasetBundle bundle;
    FollowerGraph fg;
    RetweetGraph rg;
};

Built build(std::uint64_t seed, std::size_t n = 120, double reshare = 0.2) {
    SynthConfig cfg;
    cfg.n_users = n;
    cfg.seed = seed;
    cfg.reshare_fraction = reshare;
    auto data = generate(cfg);
    Built b{std::move(data.bundle), {}, {}};
    b.fg = FollowerGraph::build(b.bundle.edges, b.bundle.seeds, b.bundle.users.size());
    b.rg = RetweetGraph::build(b.bundle.log, b.bundle.seeds, b.bundle.users.size());
    return b;
}

void close(std::optional<double> a, std::optional<double> b, double tol = 1e-12) {
    REQUIRE(a.has_value() == b.has_value());
    if (a) CHECK(std::abs(*a - *b) <= tol);
}

void same_tables(const MetricsTable& a, const MetricsTable& b, double tol) {
    REQUIRE(a.seeds.size() == b.seeds.size());
    for (std::size_t i = 0; i < a.seeds.size(); ++i) {
        const auto& x = a.seeds[i];
        const auto& y = b.seeds[i];
        CHECK(x.user == y.user);
        close(x.raw_mean, y.raw_mean, tol);
        close(x.m_s, y.m_s, tol);
        close(x.me_f_raw, y.me_f_raw, tol);
        close(x.me_r_raw, y.me_r_raw, tol);
        close(x.m_e_f, y.m_e_f, tol);
        close(x.m_e_r, y.m_e_r, tol);
        close(x.delta, y.delta, tol);
        CHECK(x.cls == y.cls);
        CHECK(x.domain_count == y.domain_count);
    }
    REQUIRE(a.user_ms.size() == b.user_ms.size());
    for (std::size_t u = 0; u < a.user_ms.size(); ++u) close(a.user_ms[u], b.user_ms[u], tol);
}

bool bit_equal(std::optional<double> a, std::optional<double> b) { return a == b; }

}  // namespace

TEST_CASE("parallel kernels agree with the serial reference") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto b = build(seed);
        for (bool unique : {false, true})
            for (Window w : {Window{}, Window{1398902400 + 5 * 86400, 1398902400 + 20 * 86400}}) {
                Engine engine(b.bundle, b.fg, b.rg, w, unique);
                for (std::uint32_t k : {1u, 2u, 4u}) {
                    same_tables(engine.metrics(k, Execution::Serial), engine.metrics(k, Execution::Parallel), 1e-12);
                    for (auto kind : {GraphKind::Follower, GraphKind::Retweet}) {
                        const auto s = engine.class_fractions(kind, k, Execution::Serial);
                        const auto p = engine.class_fractions(kind, k, Execution::Parallel);
                        REQUIRE(s.size() == p.size());
                        for (std::size_t i = 0; i < s.size(); ++i) {
                            REQUIRE(s[i].has_value() == p[i].has_value());
                            if (s[i]) {
                                CHECK(s[i]->frac_moderate == doctest::Approx(p[i]->frac_moderate).epsilon(1e-12));
                                CHECK(s[i]->n_domain_occurrences == p[i]->n_domain_occurrences);
                            }
                        }
                    }
                }
                if (unique) continue;  // the baseline always counts occurrences
                const auto s = engine.random_baseline(b.bundle.seeds, 1, 20, 7, Execution::Serial);
                const auto p = engine.random_baseline(b.bundle.seeds, 1, 20, 7, Execution::Parallel);
                for (std::size_t i = 0; i < s.size(); ++i) {
                    REQUIRE(s[i].has_value() == p[i].has_value());
                    if (s[i]) CHECK(std::abs(s[i]->frac_moderate - p[i]->frac_moderate) < 1e-12);
                }
            }
    }
}

TEST_CASE("results do not depend on the thread count") {
    const auto b = build(9, 300);
    Engine engine(b.bundle, b.fg, b.rg);
    set_thread_count(1);
    const auto one = engine.metrics(2);
    const auto base1 = engine.random_baseline(b.bundle.seeds, 1, 50, 3);
    const auto ent1 = entropy_comparison(b.bundle.seeds, b.fg, b.rg, one.user_ms, 1, 5);
    set_thread_count(4);
    const auto four = engine.metrics(2);
    const auto base4 = engine.random_baseline(b.bundle.seeds, 1, 50, 3);
    const auto ent4 = entropy_comparison(b.bundle.seeds, b.fg, b.rg, four.user_ms, 1, 5);
    set_thread_count(0);
    for (std::size_t i = 0; i < one.seeds.size(); ++i) {
        CHECK(bit_equal(one.seeds[i].m_s, four.seeds[i].m_s));
        CHECK(bit_equal(one.seeds[i].m_e_f, four.seeds[i].m_e_f));
        CHECK(bit_equal(one.seeds[i].m_e_r, four.seeds[i].m_e_r));
    }
    for (std::size_t i = 0; i < base1.size(); ++i) {
        REQUIRE(base1[i].has_value() == base4[i].has_value());
        if (base1[i]) CHECK(base1[i]->frac_moderate == base4[i]->frac_moderate);
    }
    REQUIRE(ent1.follower.size() == ent4.follower.size());
    for (std::size_t i = 0; i < ent1.follower.size(); ++i) {
        CHECK(ent1.follower[i].entropy == ent4.follower[i].entropy);
        CHECK(ent1.retweet[i].entropy == ent4.retweet[i].entropy);
    }
}

TEST_CASE("metric ranges") {
    const auto b = build(2);
    Engine engine(b.bundle, b.fg, b.rg);
    const auto t = engine.metrics(1);
    std::size_t lo = 0, hi = 0;
    for (const auto& r : t.seeds) {
        if (r.m_s) {
            CHECK(*r.m_s >= 0.0);
            CHECK(*r.m_s <= 1.0);
            CHECK(r.cls == classify(*r.m_s));
            lo += *r.m_s == 0.0;
            hi += *r.m_s == 1.0;
        }
        for (auto v : {r.m_e_f, r.m_e_r})
            if (v) {
                CHECK(*v >= 0.0);
                CHECK(*v <= 1.0);
            }
        if (r.m_e_f && r.m_e_r) CHECK(*r.delta == *r.m_e_f - *r.m_e_r);
    }
    // Normalized over all scored users, so seeds may not hit both ends,
    // but the scored population does.
    std::size_t all_lo = 0, all_hi = 0;
    for (const auto& v : t.user_ms)
        if (v) all_lo += *v == 0.0, all_hi += *v == 1.0;
    CHECK(all_lo >= 1);
    CHECK(all_hi >= 1);
}

TEST_CASE("window that excludes everything leaves exposure empty") {
    const auto b = build(3, 60);
    Engine engine(b.bundle, b.fg, b.rg, Window{0, 10});
    const auto t = engine.metrics(1);
    for (const auto& r : t.seeds) {
        CHECK_FALSE(r.m_e_f);
        CHECK_FALSE(r.m_e_r);
        CHECK_FALSE(r.delta);
    }
    CHECK_FALSE(t.me_norm);
    // Individual moderacy still uses the full log.
    std::size_t scored = 0;
    for (const auto& r : t.seeds) scored += r.m_s.has_value();
    CHECK(scored > 0);
}

TEST_CASE("single-user and empty-log bundles") {
    const auto one = testing::bundle_from("domain,score\nx.com,0\n", "follower,friend\n",
                                          original("1", "solo", 1, "http://x.com/"), "solo");
    const auto fg = FollowerGraph::build(one.edges, one.seeds, one.users.size());
    const auto rg = RetweetGraph::build(one.log, one.seeds, one.users.size());
    Engine e(one, fg, rg);
    const auto t = e.metrics(1, Execution::Serial);
    REQUIRE(t.seeds.size() == 1);
    CHECK(t.seeds[0].m_s.has_value());
    CHECK_FALSE(t.seeds[0].m_e_f);
    CHECK_FALSE(t.seeds[0].m_e_r);
    same_tables(t, e.metrics(1, Execution::Parallel), 0.0);

    const auto empty = testing::bundle_from("domain,score\nx.com,0\n", "follower,friend\ns,a\n", "");
    const auto fg2 = FollowerGraph::build(empty.edges, empty.seeds, empty.users.size());
    const auto rg2 = RetweetGraph::build(empty.log, empty.seeds, empty.users.size());
    Engine e2(empty, fg2, rg2);
    const auto t2 = e2.metrics(1);
    for (const auto& r : t2.seeds) {
        CHECK_FALSE(r.m_s);
        CHECK_FALSE(r.m_e_f);
    }
    CHECK_FALSE(t2.ms_norm);
    const auto ent = entropy_comparison(empty.seeds, fg2, rg2, t2.user_ms, 1, 5);
    CHECK(ent.follower.empty());
    CHECK_FALSE(ent.test);
}

TEST_CASE("entropy of a pure retweet subset is lower") {
    // s follows a, a2 (left), b (right), c (centre) and retweets only the left pair.
    // Entropy needs at least two scored friends per pool.
    const char* scores = "domain,score\nl.com,0\nc.com,0.5\nr.com,1\nlc.com,0.25\n";
    std::string ev = original("a0", "a", 1, "http://l.com/") + original("b0", "b", 1, "http://r.com/") +
                     original("c0", "c", 1, "http://c.com/") + original("s0", "s", 1, "http://lc.com/") +
                     original("a20", "a2", 1, "http://l.com/") + retweet("r", "s", 2, "a") +
                     retweet("r1", "s", 2, "a2");
    const auto bundle = testing::bundle_from(scores, "follower,friend\ns,a\ns,a2\ns,b\ns,c\n", ev);
    const auto fg = FollowerGraph::build(bundle.edges, bundle.seeds, bundle.users.size());
    const auto rg = RetweetGraph::build(bundle.log, bundle.seeds, bundle.users.size());
    Engine e(bundle, fg, rg);
    const auto t = e.metrics(1);
    const auto ent = entropy_comparison(bundle.seeds, fg, rg, t.user_ms, 1, 5);
    REQUIRE(ent.follower.size() == 1);
    CHECK(ent.retweet[0].entropy == 0.0);
    CHECK(ent.follower[0].entropy > 0.0);

    // Identical friend sets give identical entropies.
    std::string ev2 = ev + retweet("r2", "s", 3, "b") + retweet("r3", "s", 4, "c");
    const auto b2 = testing::bundle_from(scores, "follower,friend\ns,a\ns,a2\ns,b\ns,c\n", ev2);
    const auto fg2 = FollowerGraph::build(b2.edges, b2.seeds, b2.users.size());
    const auto rg2 = RetweetGraph::build(b2.log, b2.seeds, b2.users.size());
    Engine e2(b2, fg2, rg2);
    const auto ent2 = entropy_comparison(b2.seeds, fg2, rg2, e2.metrics(1).user_ms, 1, 5);
    REQUIRE(ent2.follower.size() == 1);
    CHECK(ent2.follower[0].entropy == ent2.retweet[0].entropy);
}

TEST_CASE("identical pools give identical exposure under both kinds") {
    // Every seed retweets each friend once, so both pools coincide.
    SynthConfig cfg;
    cfg.n_users = 50;
    cfg.seed = 4;
    auto data = generate(cfg);
    auto& b = data.bundle;
    std::vector<TweetEvent> events = b.log.events();
    int n = 0;
    const auto fg = FollowerGraph::build(b.edges, b.seeds, b.users.size());
    std::vector<TweetEvent> filtered;
    for (auto& e : events)
        if (e.kind == EventKind::Original) filtered.push_back(e);
    for (auto s : b.seeds)
        for (auto f : fg.friends(s)) {
            TweetEvent r;
            r.id = "x" + std::to_string(n++);
            r.author = s;
            r.timestamp = 1;
            r.kind = EventKind::Retweet;
            r.original_author = f;
            filtered.push_back(r);
        }
    b.log = EventLog(std::move(filtered), b.users.size());
    const auto rg = RetweetGraph::build(b.log, b.seeds, b.users.size());
    Engine engine(b, fg, rg);
    for (const auto& r : engine.metrics(1).seeds) {
        CHECK(r.m_e_f == r.m_e_r);
        if (r.delta) CHECK(*r.delta == 0.0);
    }
}
