#include "echoscope/engine.hpp"

#include <algorithm>

#include <omp.h>

#include "echoscope/log.hpp"

namespace echoscope {

void set_thread_count(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

Engine::Engine(const DatasetBundle& bundle, const FollowerGraph& fg, const RetweetGraph& rg, Window window,
               bool unique_domains)
    : bundle_(bundle), fg_(fg), rg_(rg), window_(window), unique_(unique_domains) {
    const auto& events = bundle.log.events();
    user_count_ = std::max({bundle.users.size(), fg.user_count(), rg.user_count()});

    // Domain ids follow the table's sorted order.
    std::map<std::string_view, std::uint32_t, std::less<>> ids;
    for (const auto& [domain, score] : bundle.scores) {
        ids.emplace(domain, static_cast<std::uint32_t>(domain_score_.size()));
        domain_score_.push_back(score);
    }

    event_offsets_.assign(events.size() + 1, 0);
    for (std::size_t i = 0; i < events.size(); ++i) {
        for (const auto& d : events[i].domains)
            if (auto it = ids.find(d); it != ids.end()) event_domains_.push_back(it->second);
        event_offsets_[i + 1] = event_domains_.size();
    }

    pools_.resize(user_count_);
    const auto n = static_cast<std::int64_t>(user_count_);
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t a = 0; a < n; ++a) {
        auto& pool = pools_[a];
        for (auto pos : bundle_.log.positions_of(static_cast<UserId>(a))) {
            if (!window_.contains(events[pos].timestamp)) continue;
            for (auto i = event_offsets_[pos]; i < event_offsets_[pos + 1]; ++i) {
                const auto d = event_domains_[i];
                const double s = domain_score_[d];
                pool.sum.add(s);
                ++pool.count;
                pool.moderate += classify_domain_score(s) == ModeracyClass::Moderate ? 1 : 0;
                if (unique_) pool.distinct.push_back(d);
            }
        }
        if (unique_) {
            std::sort(pool.distinct.begin(), pool.distinct.end());
            pool.distinct.erase(std::unique(pool.distinct.begin(), pool.distinct.end()), pool.distinct.end());
        }
    }
}

// ------------------------------------------------------------- individual

void Engine::individual_serial(std::vector<std::optional<IndividualModeracy>>& out) const {
    for (std::size_t u = 0; u < user_count_; ++u)
        out[u] = individual_moderacy(static_cast<UserId>(u), bundle_.log, bundle_.scores, unique_);
}

void Engine::individual_parallel(std::vector<std::optional<IndividualModeracy>>& out) const {
    const auto& events = bundle_.log.events();
    const auto n = static_cast<std::int64_t>(user_count_);
#pragma omp parallel
    {
        std::vector<std::uint32_t> ids;
#pragma omp for schedule(dynamic, 256)
        for (std::int64_t u = 0; u < n; ++u) {
            ids.clear();
            std::size_t occurrences = 0;
            for (auto pos : bundle_.log.positions_of(static_cast<UserId>(u))) {
                if (events[pos].kind != EventKind::Original) continue;
                for (auto i = event_offsets_[pos]; i < event_offsets_[pos + 1]; ++i) ids.push_back(event_domains_[i]);
            }
            occurrences = ids.size();
            if (unique_) {
                std::sort(ids.begin(), ids.end());
                ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
            }
            if (ids.empty()) continue;
            CompensatedSum s;
            for (auto d : ids) s.add(domain_score_[d]);
            const double mu = std::clamp(s.value() / double(ids.size()), 0.0, 1.0);
            out[u] = IndividualModeracy{mu, fold(mu), occurrences};
        }
    }
}

// --------------------------------------------------------------- exposure

std::optional<double> Engine::pooled_mean(std::span<const UserId> friends, std::vector<std::uint32_t>& stamp,
                                          std::uint32_t tag) const {
    if (!unique_) {
        CompensatedSum s;
        std::uint64_t count = 0;
        for (auto f : friends) {
            s.merge(pools_[f].sum);
            count += pools_[f].count;
        }
        if (count == 0) return std::nullopt;
        return std::clamp(s.value() / double(count), 0.0, 1.0);
    }
    CompensatedSum s;
    std::uint64_t count = 0;
    for (auto f : friends)
        for (auto d : pools_[f].distinct) {
            if (stamp[d] == tag) continue;
            stamp[d] = tag;
            s.add(domain_score_[d]);
            ++count;
        }
    if (count == 0) return std::nullopt;
    return std::clamp(s.value() / double(count), 0.0, 1.0);
}

MetricsTable Engine::metrics(std::uint32_t k, Execution exec) const {
    MetricsTable table;
    table.k = k;

    std::vector<std::optional<IndividualModeracy>> individual(user_count_);
    if (exec == Execution::Parallel) individual_parallel(individual);
    else individual_serial(individual);

    std::vector<double> folded;
    for (const auto& im : individual)
        if (im) folded.push_back(im->folded);
    table.user_mu.assign(user_count_, std::nullopt);
    table.user_ms.assign(user_count_, std::nullopt);
    if (!folded.empty()) {
        table.ms_norm = Normalization::fit(folded);
        for (std::size_t u = 0; u < user_count_; ++u)
            if (individual[u]) {
                table.user_mu[u] = individual[u]->mu;
                table.user_ms[u] = table.ms_norm->apply(individual[u]->folded);
            }
    }

    const auto& seeds = fg_.seeds();
    table.seeds.resize(seeds.size());
    auto fill_identity = [&](UserMetrics& m, UserId u) {
        m.user = u;
        if (individual[u]) {
            m.raw_mean = individual[u]->mu;
            m.folded = individual[u]->folded;
            m.m_s = table.user_ms[u];
            m.domain_count = individual[u]->occurrences;
        }
    };

    const auto n = static_cast<std::int64_t>(seeds.size());
    if (exec == Execution::Parallel) {
#pragma omp parallel
        {
            std::vector<std::uint32_t> stamp(unique_ ? domain_score_.size() : 0, 0);
            std::uint32_t tag = 0;
#pragma omp for schedule(dynamic, 64)
            for (std::int64_t i = 0; i < n; ++i) {
                const UserId u = seeds[i];
                auto& m = table.seeds[i];
                fill_identity(m, u);
                if (!m.raw_mean) continue;
                if (auto raw = pooled_mean(fg_.friends(u), stamp, ++tag)) {
                    m.me_f_raw = *raw;
                    m.me_f_folded = fold_by(*raw, *m.raw_mean);
                }
                const auto rt_friends = rg_.friends(u, k);
                if (auto raw = pooled_mean(rt_friends, stamp, ++tag)) {
                    m.me_r_raw = *raw;
                    m.me_r_folded = fold_by(*raw, *m.raw_mean);
                }
            }
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i) {
            const UserId u = seeds[i];
            auto& m = table.seeds[i];
            fill_identity(m, u);
            const auto ef = exposure_moderacy(u, GraphKind::Follower, fg_, rg_, bundle_.log, bundle_.scores, k,
                                              window_, m.raw_mean, unique_);
            const auto er = exposure_moderacy(u, GraphKind::Retweet, fg_, rg_, bundle_.log, bundle_.scores, k,
                                              window_, m.raw_mean, unique_);
            if (ef) {
                m.me_f_raw = ef->raw;
                m.me_f_folded = ef->folded;
            }
            if (er) {
                m.me_r_raw = er->raw;
                m.me_r_folded = er->folded;
            }
        }
    }

    // Follower and retweet exposures share one normalization so deltas compare like with like.
    std::vector<double> exposures;
    for (const auto& m : table.seeds) {
        if (m.me_f_folded) exposures.push_back(*m.me_f_folded);
        if (m.me_r_folded) exposures.push_back(*m.me_r_folded);
    }
    if (!exposures.empty()) table.me_norm = Normalization::fit(exposures);
    for (auto& m : table.seeds) {
        if (m.me_f_folded) m.m_e_f = table.me_norm->apply(*m.me_f_folded);
        if (m.me_r_folded) m.m_e_r = table.me_norm->apply(*m.me_r_folded);
        m.delta = exposure_delta(m.m_e_f, m.m_e_r);
        if (m.m_s) m.cls = classify(*m.m_s);
    }
    return table;
}

// ---------------------------------------------------------- class fractions

std::vector<std::optional<ExposureProfile>> Engine::class_fractions(GraphKind kind, std::uint32_t k,
                                                                    Execution exec) const {
    const auto& seeds = fg_.seeds();
    std::vector<std::optional<ExposureProfile>> out(seeds.size());
    const auto n = static_cast<std::int64_t>(seeds.size());
    if (exec == Execution::Serial) {
        for (std::int64_t i = 0; i < n; ++i)
            out[i] = exposure_class_fractions(seeds[i], kind, fg_, rg_, bundle_.log, bundle_.scores, k, window_);
        return out;
    }
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
        const UserId u = seeds[i];
        const auto friends = exposure_friends(u, kind, fg_, rg_, k);
        std::uint64_t count = 0, moderate = 0;
        for (auto f : friends) {
            count += pools_[f].count;
            moderate += pools_[f].moderate;
        }
        if (count == 0) continue;
        ExposureProfile p;
        p.user = u;
        p.kind = kind;
        p.n_domain_occurrences = count;
        p.frac_moderate = double(moderate) / double(count);
        p.frac_hardline = double(count - moderate) / double(count);
        out[i] = p;
    }
    return out;
}

std::vector<std::optional<ExposureProfile>> Engine::random_baseline(std::span<const UserId> users, std::uint32_t k,
                                                                    std::size_t reps, std::uint64_t seed,
                                                                    Execution exec) const {
    std::vector<std::optional<ExposureProfile>> out(users.size());
    const auto n = static_cast<std::int64_t>(users.size());
    if (exec == Execution::Serial) {
        for (std::int64_t i = 0; i < n; ++i)
            out[i] = random_baseline_fractions(users[i], fg_, rg_, bundle_.log, bundle_.scores, k, window_, reps,
                                               seed);
        return out;
    }
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n; ++i) {
        const UserId u = users[i];
        const auto size = rg_.friends(u, k).size();
        const auto n_friends = fg_.friends(u).size();
        if (size == 0 || n_friends == 0) continue;
        Stream rng(seed, StreamOp::RandomBaseline, u);
        CompensatedSum moderate, hardline, occurrences;
        std::size_t used = 0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const auto subset = sample_random_friend_subset(u, fg_, std::min(size, n_friends), rng);
            std::uint64_t count = 0, mod = 0;
            for (auto f : subset) {
                count += pools_[f].count;
                mod += pools_[f].moderate;
            }
            if (count == 0) continue;
            moderate.add(double(mod) / double(count));
            hardline.add(double(count - mod) / double(count));
            occurrences.add(double(count));
            ++used;
        }
        if (used == 0) continue;
        ExposureProfile p;
        p.user = u;
        p.kind = GraphKind::Follower;
        p.frac_moderate = moderate.value() / double(used);
        p.frac_hardline = hardline.value() / double(used);
        p.n_domain_occurrences = static_cast<std::size_t>(occurrences.value() / double(used) + 0.5);
        out[i] = p;
    }
    return out;
}

// ---------------------------------------------------------------- entropy

namespace {

std::optional<std::pair<double, std::size_t>> friend_entropy(std::span<const UserId> friends,
                                                             std::span<const std::optional<double>> user_ms,
                                                             std::size_t n_bins) {
    std::vector<double> scores;
    for (auto f : friends)
        if (f < user_ms.size() && user_ms[f]) scores.push_back(*user_ms[f]);
    if (scores.size() < 2) return std::nullopt;
    return std::make_pair(shannon_entropy(scores, n_bins), scores.size());
}

}  // namespace

EntropyComparison entropy_comparison(std::span<const UserId> users, const FollowerGraph& fg,
                                     const RetweetGraph& rg, std::span<const std::optional<double>> user_ms,
                                     std::uint32_t k, std::size_t n_bins, Execution exec) {
    struct Row {
        std::optional<std::pair<double, std::size_t>> f, r;
    };
    std::vector<Row> rows(users.size());
    const auto n = static_cast<std::int64_t>(users.size());
    auto compute = [&](std::int64_t i) {
        const UserId u = users[i];
        rows[i].f = friend_entropy(fg.friends(u), user_ms, n_bins);
        const auto rt = rg.friends(u, k);
        rows[i].r = friend_entropy(rt, user_ms, n_bins);
    };
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
        for (std::int64_t i = 0; i < n; ++i) compute(i);
    } else {
        for (std::int64_t i = 0; i < n; ++i) compute(i);
    }

    EntropyComparison out;
    std::vector<double> ef, er;
    for (std::size_t i = 0; i < users.size(); ++i) {
        if (!rows[i].f || !rows[i].r) {
            ++out.skipped;
            continue;
        }
        out.follower.push_back({users[i], GraphKind::Follower, rows[i].f->first, n_bins, rows[i].f->second});
        out.retweet.push_back({users[i], GraphKind::Retweet, rows[i].r->first, n_bins, rows[i].r->second});
        ef.push_back(rows[i].f->first);
        er.push_back(rows[i].r->first);
    }
    if (!ef.empty()) out.test = mann_whitney_u(ef, er);
    return out;
}

}  // namespace echoscope
