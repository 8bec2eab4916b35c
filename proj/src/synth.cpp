#include "echoscope/synth.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "echoscope/rng.hpp"

namespace echoscope {

namespace {

constexpr std::array<double, 5> kLevels{0.0, 0.25, 0.5, 0.75, 1.0};
constexpr std::array<const char*, 5> kSuffixes{".com", ".co.uk", ".org", ".com.au", ".net"};
constexpr std::size_t kUnscoredDomains = 5;

/// E[exp(-|X - Y| / lambda)] for X, Y independent uniform on [0, 1].
double mean_follow_kernel(double lambda) {
    if (std::isinf(lambda)) return 1.0;
    return 2.0 * (lambda + lambda * lambda * std::expm1(-1.0 / lambda));
}

std::string scored_domain_name(std::size_t j) { return fmt::format("outlet{}{}", j, kSuffixes[j % kSuffixes.size()]); }
std::string unscored_domain_name(std::size_t j) { return fmt::format("personal{}.blog", j); }

struct Draft {
    std::vector<TweetEvent> originals;
    std::vector<TweetEvent> retweets;
    std::vector<TweetEvent> reshares;
};

struct Candidate {
    const TweetEvent* event;
    double cumulative;
};

/// Picks index by cumulative weight.
const TweetEvent* pick(const std::vector<Candidate>& cands, Stream& rng) {
    const double x = rng.uniform() * cands.back().cumulative;
    auto it = std::upper_bound(cands.begin(), cands.end(), x,
                               [](double v, const Candidate& c) { return v < c.cumulative; });
    if (it == cands.end()) --it;
    return it->event;
}

}  // namespace

void SynthConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw InputError(std::string("synth config: ") + what);
    };
    require(n_users >= 1, "n_users must be >= 1");
    require(n_domains >= 1, "n_domains must be >= 1");
    require(follow_homophily > 0.0, "follow_homophily must be > 0");
    require(base_follow_prob >= 0.0 && base_follow_prob <= 1.0, "base_follow_prob must be in [0,1]");
    require(attention_bias >= 0.0 && std::isfinite(attention_bias), "attention_bias must be finite and >= 0");
    require(activity_rate > 0.0, "activity_rate must be > 0");
    require(retweet_rate >= 0.0, "retweet_rate must be >= 0");
    require(reshare_fraction >= 0.0 && reshare_fraction <= 1.0, "reshare_fraction must be in [0,1]");
    require(activity_sigma >= 0.0, "activity_sigma must be >= 0");
    require(ideology_noise >= 0.0, "ideology_noise must be >= 0");
    require(url_prob >= 0.0 && url_prob <= 1.0, "url_prob must be in [0,1]");
    require(unscored_url_prob >= 0.0 && unscored_url_prob <= 1.0, "unscored_url_prob must be in [0,1]");
    require(start_time >= 0, "start_time must be >= 0");
    require(duration >= 1, "duration must be >= 1");

    const double expected_friends =
        double(n_users - 1) * base_follow_prob * mean_follow_kernel(follow_homophily);
    const double friend_events = expected_friends * activity_rate;
    if (retweet_rate > 0.0 && friend_events < retweet_rate)
        throw InputError(fmt::format("synth config infeasible: {:.3g} expected retweets per user exceed {:.3g} "
                                     "expected friend tweets",
                                     retweet_rate, friend_events));
}

nlohmann::ordered_json SynthConfig::to_json() const {
    nlohmann::ordered_json j;
    j["n_users"] = n_users;
    j["n_domains"] = n_domains;
    j["follow_homophily"] = follow_homophily;
    j["base_follow_prob"] = base_follow_prob;
    j["attention_bias"] = attention_bias;
    j["activity_rate"] = activity_rate;
    j["retweet_rate"] = retweet_rate;
    j["reshare_fraction"] = reshare_fraction;
    j["activity_sigma"] = activity_sigma;
    j["ideology_noise"] = ideology_noise;
    j["url_prob"] = url_prob;
    j["unscored_url_prob"] = unscored_url_prob;
    j["start_time"] = start_time;
    j["duration"] = duration;
    j["seed"] = seed;
    return j;
}

SynthConfig parse_synth_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_synth_config_text(ss.str());
}

SynthConfig parse_synth_config_text(const std::string& text) {
    SynthConfig c;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError(fmt::format("synth config line {}: expected key=value", line_no));
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));

        auto as_double = [&] {
            double v = 0.0;
            if (value == "inf" || value == "infinity") return HUGE_VAL;
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc() || p != value.data() + value.size())
                throw InputError(fmt::format("synth config line {}: bad number '{}'", line_no, value));
            return v;
        };
        auto as_int = [&]<class T>(T& out) {
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
            if (ec != std::errc() || p != value.data() + value.size())
                throw InputError(fmt::format("synth config line {}: bad integer '{}'", line_no, value));
        };

        if (key == "n_users") as_int(c.n_users);
        else if (key == "n_domains") as_int(c.n_domains);
        else if (key == "follow_homophily" || key == "lambda") c.follow_homophily = as_double();
        else if (key == "base_follow_prob") c.base_follow_prob = as_double();
        else if (key == "attention_bias" || key == "beta") c.attention_bias = as_double();
        else if (key == "activity_rate") c.activity_rate = as_double();
        else if (key == "retweet_rate") c.retweet_rate = as_double();
        else if (key == "reshare_fraction") c.reshare_fraction = as_double();
        else if (key == "activity_sigma") c.activity_sigma = as_double();
        else if (key == "ideology_noise") c.ideology_noise = as_double();
        else if (key == "url_prob") c.url_prob = as_double();
        else if (key == "unscored_url_prob") c.unscored_url_prob = as_double();
        else if (key == "start_time") as_int(c.start_time);
        else if (key == "duration") as_int(c.duration);
        else if (key == "seed") as_int(c.seed);
        else throw InputError(fmt::format("synth config line {}: unknown key '{}'", line_no, key));
    }
    return c;
}

SynthDataset generate(const SynthConfig& config) {
    config.validate();
    const std::size_t n = config.n_users;
    const auto width = std::to_string(n - 1).size();

    SynthDataset out;
    auto& bundle = out.bundle;
    auto& truth = out.truth;
    truth.null_model = config.attention_bias == 0.0;

    for (std::size_t i = 0; i < n; ++i) bundle.users.intern(fmt::format("u{:0{}}", i, width));
    bundle.seeds.resize(n);
    for (std::size_t i = 0; i < n; ++i) bundle.seeds[i] = static_cast<UserId>(i);

    // Domain table: scored outlets cycle through the five levels.
    std::array<std::vector<std::string>, kLevels.size()> by_level;
    for (std::size_t j = 0; j < config.n_domains; ++j) {
        const auto name = scored_domain_name(j);
        bundle.scores.emplace(name, kLevels[j % kLevels.size()]);
        by_level[j % kLevels.size()].push_back(name);
    }
    truth.domain_scores = bundle.scores;

    // Ideology and activity.
    truth.ideology.resize(n);
    std::vector<double> activity(n);
    for (std::size_t i = 0; i < n; ++i) {
        Stream rng(config.seed, StreamOp::SynthIdeology, i);
        truth.ideology[i] = rng.uniform();
        const double s = config.activity_sigma;
        activity[i] = std::exp(s * rng.normal() - 0.5 * s * s);
    }
    const auto& x = truth.ideology;

    // Homophilic follow edges.
    std::vector<std::vector<UserId>> follows(n);
    const auto ni = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < ni; ++i) {
        Stream rng(config.seed, StreamOp::SynthFollow, std::uint64_t(i));
        for (std::size_t j = 0; j < n; ++j) {
            if (j == std::size_t(i)) continue;
            const double p = config.base_follow_prob * std::exp(-std::abs(x[i] - x[j]) / config.follow_homophily);
            if (rng.bernoulli(p)) follows[i].push_back(static_cast<UserId>(j));
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (auto j : follows[i]) bundle.edges.edges.emplace_back(static_cast<UserId>(i), j);

    const auto end_time = config.start_time + config.duration - 1;
    auto later = [&](Stream& rng, std::int64_t after) {
        return after + static_cast<std::int64_t>(rng.below(std::uint64_t(end_time - after) + 1));
    };
    auto kernel = [&](std::size_t u, UserId author) {
        return std::exp(-config.attention_bias * std::abs(x[u] - x[author]));
    };

    std::vector<Draft> drafts(n);

    // Original tweets.
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < ni; ++i) {
        Stream rng(config.seed, StreamOp::SynthOriginals, std::uint64_t(i));
        const auto count = rng.poisson(config.activity_rate * activity[i]);
        auto& mine = drafts[i].originals;
        for (std::uint64_t t = 0; t < count; ++t) {
            TweetEvent e;
            e.id = fmt::format("{}-o{}", bundle.users.name(UserId(i)), t);
            e.author = static_cast<UserId>(i);
            e.timestamp = config.start_time + static_cast<std::int64_t>(rng.below(std::uint64_t(config.duration)));
            e.kind = EventKind::Original;
            if (rng.bernoulli(config.url_prob)) {
                if (rng.bernoulli(config.unscored_url_prob)) {
                    e.domains.push_back(unscored_domain_name(rng.below(kUnscoredDomains)));
                } else {
                    const double target = std::clamp(x[i] + config.ideology_noise * rng.normal(), 0.0, 1.0);
                    auto level = static_cast<std::size_t>(std::lround(target * 4.0));
                    // Fall back to the nearest populated level.
                    for (std::size_t d = 0; by_level[level].empty(); ++d) {
                        if (level >= d && !by_level[level - d].empty()) { level -= d; break; }
                        if (level + d < kLevels.size() && !by_level[level + d].empty()) { level += d; break; }
                    }
                    const auto& choices = by_level[level];
                    e.domains.push_back(choices[rng.below(choices.size())]);
                }
            }
            mine.push_back(std::move(e));
        }
    }

    // First-hand retweets of friends' originals under the attention kernel.
    const double first_share = 1.0 - config.reshare_fraction;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < ni; ++i) {
        Stream rng(config.seed, StreamOp::SynthRetweets, std::uint64_t(i));
        const auto count = rng.poisson(config.retweet_rate * activity[i] * first_share);
        if (count == 0) continue;
        std::vector<Candidate> cands;
        double total = 0.0;
        for (auto f : follows[i]) {
            const double w = kernel(std::size_t(i), f);
            for (const auto& e : drafts[f].originals) {
                total += w;
                cands.push_back({&e, total});
            }
        }
        if (cands.empty() || total <= 0.0) continue;
        for (std::uint64_t t = 0; t < count; ++t) {
            const auto* src = pick(cands, rng);
            TweetEvent e;
            e.id = fmt::format("{}-r{}", bundle.users.name(UserId(i)), t);
            e.author = static_cast<UserId>(i);
            e.timestamp = later(rng, src->timestamp);
            e.kind = EventKind::Retweet;
            e.original_author = src->author;
            e.domains = src->domains;
            drafts[i].retweets.push_back(std::move(e));
        }
    }

    // Re-shares of friends' retweets; the edge goes to the original author.
    if (config.reshare_fraction > 0.0) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < ni; ++i) {
            Stream rng(config.seed, StreamOp::SynthReshares, std::uint64_t(i));
            const auto count = rng.poisson(config.retweet_rate * activity[i] * config.reshare_fraction);
            if (count == 0) continue;
            std::vector<Candidate> cands;
            double total = 0.0;
            for (auto f : follows[i])
                for (const auto& e : drafts[f].retweets) {
                    if (*e.original_author == UserId(i)) continue;
                    total += kernel(std::size_t(i), *e.original_author);
                    cands.push_back({&e, total});
                }
            if (cands.empty() || total <= 0.0) continue;
            for (std::uint64_t t = 0; t < count; ++t) {
                const auto* src = pick(cands, rng);
                TweetEvent e;
                e.id = fmt::format("{}-s{}", bundle.users.name(UserId(i)), t);
                e.author = static_cast<UserId>(i);
                e.timestamp = later(rng, src->timestamp);
                e.kind = EventKind::Retweet;
                e.original_author = src->original_author;
                e.domains = src->domains;
                drafts[i].reshares.push_back(std::move(e));
            }
        }
    }

    std::vector<TweetEvent> events;
    std::size_t total_urls = 0;
    for (auto& d : drafts) {
        for (auto* part : {&d.originals, &d.retweets, &d.reshares})
            for (auto& e : *part) {
                total_urls += e.domains.size();
                events.push_back(std::move(e));
            }
    }
    bundle.log = EventLog(std::move(events), bundle.users.size());
    bundle.log.total_urls = total_urls;
    return out;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

}  // namespace

DatasetPaths synth_paths(const std::filesystem::path& dir) {
    return {dir / "scores.csv", dir / "edges.csv", dir / "events.jsonl", dir / "seeds.txt"};
}

void write_synth(const std::filesystem::path& dir, const SynthDataset& data, const SynthConfig& config) {
    std::filesystem::create_directories(dir);
    const auto paths = synth_paths(dir);
    const auto& b = data.bundle;
    {
        auto out = open_output(paths.scores);
        write_domain_scores(out, b.scores);
    }
    {
        auto out = open_output(paths.edges);
        write_follow_edges(out, b.edges, b.users);
    }
    {
        auto out = open_output(*paths.seeds);
        write_seeds(out, b.seeds, b.users);
    }
    {
        // Full URLs so ingest exercises pay-level-domain extraction.
        auto out = open_output(paths.events);
        for (const auto& e : b.log.events()) {
            nlohmann::ordered_json obj;
            obj["id"] = e.id;
            obj["author"] = b.users.name(e.author);
            obj["ts"] = e.timestamp;
            obj["kind"] = e.kind == EventKind::Original ? "original" : "retweet";
            if (e.original_author) obj["orig_author"] = b.users.name(*e.original_author);
            auto urls = nlohmann::json::array();
            const auto base = e.kind == EventKind::Original ? e.id : e.id.substr(0, e.id.find('-'));
            for (const auto& d : e.domains) {
                const char* sub = d.size() % 2 ? "www." : "news.";
                urls.push_back(fmt::format("https://{}{}/story/{}?src=tw", sub, d, base));
            }
            obj["urls"] = std::move(urls);
            out << obj.dump() << '\n';
        }
    }
    {
        nlohmann::ordered_json truth;
        truth["null-model"] = data.truth.null_model;
        truth["config"] = config.to_json();
        nlohmann::ordered_json ideology;
        for (std::size_t i = 0; i < data.truth.ideology.size(); ++i)
            ideology[b.users.name(static_cast<UserId>(i))] = data.truth.ideology[i];
        truth["ideology"] = std::move(ideology);
        nlohmann::ordered_json scores;
        for (const auto& [d, s] : data.truth.domain_scores) scores[d] = s;
        truth["domain_scores"] = std::move(scores);
        auto out = open_output(dir / "truth.json");
        out << truth.dump(2) << '\n';
    }
}

}  // namespace echoscope
