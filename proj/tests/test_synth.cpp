#include <doctest.h>

#include <cmath>

#include "echoscope/engine.hpp"
#include "echoscope/graph_cache.hpp"
#include "echoscope/synth.hpp"
#include "helpers.hpp"

using namespace echoscope;

namespace {

struct Correlations {
    double r_f = 0, r_r = 0;
};

Correlations correlations(const SynthConfig& cfg) {
    const auto data = generate(cfg);
    const auto& b = data.bundle;
    const auto fg = FollowerGraph::build(b.edges, b.seeds, b.users.size());
    const auto rg = RetweetGraph::build(b.log, b.seeds, b.users.size());
    Engine engine(b, fg, rg);
    const auto t = engine.metrics(1);
    std::vector<double> ms_f, me_f, ms_r, me_r;
    for (const auto& r : t.seeds) {
        if (r.m_s && r.m_e_f) ms_f.push_back(*r.m_s), me_f.push_back(*r.m_e_f);
        if (r.m_s && r.m_e_r) ms_r.push_back(*r.m_s), me_r.push_back(*r.m_e_r);
    }
    return {pearson(ms_f, me_f).r, pearson(ms_r, me_r).r};
}

std::uint64_t dir_fingerprint(const std::filesystem::path& dir) {
    return fingerprint_files({dir / "scores.csv", dir / "edges.csv", dir / "events.jsonl", dir / "seeds.txt",
                              dir / "truth.json"});
}

}  // namespace

TEST_CASE("config parsing") {
    const auto c = parse_synth_config_text("# comment\nn_users = 50\nlambda=0.3\nbeta=inf\nseed=9\n\n");
    CHECK(c.n_users == 50);
    CHECK(c.follow_homophily == 0.3);
    CHECK(std::isinf(c.attention_bias));
    CHECK(c.seed == 9);
    CHECK_THROWS_AS(parse_synth_config_text("n_users=abc\n"), InputError);
    CHECK_THROWS_AS(parse_synth_config_text("colour=blue\n"), InputError);
    CHECK_THROWS_AS(parse_synth_config_text("just text\n"), InputError);
    // Infinite attention bias is parseable but rejected by validation.
    CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("infeasible configs are rejected") {
    SynthConfig c;
    c.base_follow_prob = 0.001;
    c.n_users = 20;
    c.retweet_rate = 50;
    CHECK_THROWS_AS(c.validate(), InputError);
    CHECK_THROWS_AS(generate(c), InputError);
    SynthConfig ok;
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("same config, same bytes") {
    SynthConfig c;
    c.n_users = 100;
    c.seed = 1;
    const auto a = testing::scratch("synth-a");
    const auto b = testing::scratch("synth-b");
    write_synth(a, generate(c), c);
    write_synth(b, generate(c), c);
    for (const char* f : {"scores.csv", "edges.csv", "events.jsonl", "seeds.txt", "truth.json"})
        CHECK(testing::slurp(a / f) == testing::slurp(b / f));
    // Pinned output so that a platform or toolchain change that alters the
    // generated bytes is caught.
    CHECK(dir_fingerprint(a) == 0xd499714ac0f70a03ULL);
    c.seed = 2;
    write_synth(b, generate(c), c);
    CHECK(testing::slurp(a / "events.jsonl") != testing::slurp(b / "events.jsonl"));
}

TEST_CASE("generated bundles validate and round-trip through files") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthConfig c;
        c.n_users = 80;
        c.seed = seed;
        c.reshare_fraction = seed % 2 ? 0.3 : 0.0;
        const auto data = generate(c);
        CHECK(validate_dataset(data.bundle).error_count() == 0);
        const auto dir = testing::scratch("synth-rt");
        write_synth(dir, data, c);
        const auto loaded = load_dataset(synth_paths(dir));
        CHECK(validate_dataset(loaded).error_count() == 0);
        CHECK(loaded.log.size() == data.bundle.log.size());
        CHECK(loaded.edges.edges.size() == data.bundle.edges.edges.size());
        CHECK(loaded.seeds.size() == data.bundle.seeds.size());
        CHECK(loaded.scores == data.bundle.scores);
        CHECK(loaded.log.dropped_urls == 0);
    }
}

TEST_CASE("truth sidecar flags the null model") {
    SynthConfig c;
    c.n_users = 30;
    c.attention_bias = 0;
    const auto dir = testing::scratch("synth-null");
    const auto data = generate(c);
    CHECK(data.truth.null_model);
    write_synth(dir, data, c);
    const auto truth = nlohmann::json::parse(testing::slurp(dir / "truth.json"));
    CHECK(truth["null-model"] == true);
    CHECK(truth["ideology"].size() == 30);
    c.attention_bias = 5;
    CHECK_FALSE(generate(c).truth.null_model);
}

TEST_CASE("planted structure") {
    SynthConfig c;
    c.n_users = 300;
    c.seed = 4;
    const auto data = generate(c);
    // Ideologies roughly uniform on [0, 1].
    double mean = 0;
    for (double x : data.truth.ideology) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
        mean += x / double(data.truth.ideology.size());
    }
    CHECK(std::abs(mean - 0.5) < 0.06);
    // Domain scores sit on the five-level scale.
    for (const auto& [d, s] : data.truth.domain_scores) CHECK(std::fmod(s * 4, 1.0) == 0.0);
    // Homophilic follows: friends are closer in ideology than random pairs.
    const auto& b = data.bundle;
    double close = 0;
    for (const auto& [u, v] : b.edges.edges)
        close += std::abs(data.truth.ideology[u] - data.truth.ideology[v]) / double(b.edges.edges.size());
    CHECK(close < 1.0 / 3.0 - 0.05);
}

TEST_CASE("without homophily the follower exposure carries no signal") {
    double sum = 0;
    const int runs = 5;
    for (int r = 0; r < runs; ++r) {
        SynthConfig c;
        c.n_users = 600;
        c.follow_homophily = HUGE_VAL;
        c.base_follow_prob = 0.05;
        c.seed = 50 + r;
        sum += correlations(c).r_f;
    }
    CHECK(std::abs(sum / runs) < 0.1);
}

TEST_CASE("stronger attention bias widens the retweet-vs-follower correlation gap") {
    const double betas[] = {0, 1, 3, 5};
    const int seeds = 20;
    std::vector<double> gap;
    for (double beta : betas) {
        double g = 0;
        for (int s = 0; s < seeds; ++s) {
            SynthConfig c;
            c.n_users = 300;
            c.attention_bias = beta;
            c.seed = 1000 + s;
            const auto r = correlations(c);
            g += (r.r_r - r.r_f) / seeds;
        }
        gap.push_back(g);
    }
    for (std::size_t i = 1; i < gap.size(); ++i) CHECK(gap[i] >= gap[i - 1]);
}
