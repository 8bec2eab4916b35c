#include "echoscope/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "echoscope/common.hpp"

namespace echoscope {

namespace {

double mean_of(std::span<const double> v) {
    CompensatedSum s;
    for (double x : v) s.add(x);
    return s.value() / double(v.size());
}

struct Ranking {
    std::vector<double> ranks;       // midranks of the pooled sample, a first then b
    double tie_term = 0.0;           // sum of t^3 - t over tie groups
};

Ranking rank_pooled(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size() + b.size();
    std::vector<std::pair<double, std::size_t>> pooled;
    pooled.reserve(n);
    for (std::size_t i = 0; i < a.size(); ++i) pooled.emplace_back(a[i], i);
    for (std::size_t i = 0; i < b.size(); ++i) pooled.emplace_back(b[i], a.size() + i);
    std::sort(pooled.begin(), pooled.end());
    Ranking r;
    r.ranks.assign(n, 0.0);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && pooled[j].first == pooled[i].first) ++j;
        const double mid = (double(i + 1) + double(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) r.ranks[pooled[t].second] = mid;
        const double t = double(j - i);
        r.tie_term += t * t * t - t;
        i = j;
    }
    return r;
}

void check_samples(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw UndefinedStatistic("Mann-Whitney U needs two non-empty samples");
    for (double x : a)
        if (!std::isfinite(x)) throw UndefinedStatistic("Mann-Whitney U: non-finite value");
    for (double x : b)
        if (!std::isfinite(x)) throw UndefinedStatistic("Mann-Whitney U: non-finite value");
}

double u_of_first(const Ranking& r, std::size_t n1) {
    CompensatedSum w;
    for (std::size_t i = 0; i < n1; ++i) w.add(r.ranks[i]);
    return w.value() - double(n1) * double(n1 + 1) / 2.0;
}

}  // namespace

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw UndefinedStatistic("pearson: length mismatch");
    if (x.size() < 3) throw UndefinedStatistic("pearson: need at least 3 points");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw UndefinedStatistic("pearson: non-finite value");

    const double mx = mean_of(x), my = mean_of(y);
    CompensatedSum sxy, sxx, syy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    if (sxx.value() <= 0.0 || syy.value() <= 0.0) throw UndefinedStatistic("pearson: zero variance");

    CorrelationResult res;
    res.n = x.size();
    res.r = std::clamp(sxy.value() / std::sqrt(sxx.value() * syy.value()), -1.0, 1.0);
    const double dof = double(res.n - 2);
    const double one_minus = 1.0 - res.r * res.r;
    if (one_minus <= 0.0) {
        res.p = 0.0;
    } else {
        const double t = std::abs(res.r) * std::sqrt(dof / one_minus);
        boost::math::students_t dist(dof);
        res.p = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, t)), 0.0, 1.0);
    }
    return res;
}

UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    check_samples(a, b);
    if (a.size() * b.size() <= kMannWhitneyExactLimit) return mann_whitney_u_exact(a, b);
    return mann_whitney_u_normal(a, b);
}

UTestResult mann_whitney_u_normal(std::span<const double> a, std::span<const double> b) {
    check_samples(a, b);
    const auto r = rank_pooled(a, b);
    const double n1 = double(a.size()), n2 = double(b.size()), n = n1 + n2;
    UTestResult res;
    res.n1 = a.size();
    res.n2 = b.size();
    res.u_statistic = u_of_first(r, a.size());
    const double variance = n1 * n2 / 12.0 * ((n + 1.0) - r.tie_term / (n * (n - 1.0)));
    if (variance <= 0.0) {
        res.p = 1.0;
        return res;
    }
    const double z = std::max(0.0, std::abs(res.u_statistic - n1 * n2 / 2.0) - 0.5) / std::sqrt(variance);
    res.p = std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
    return res;
}

UTestResult mann_whitney_u_exact(std::span<const double> a, std::span<const double> b) {
    check_samples(a, b);
    const auto r = rank_pooled(a, b);
    const std::size_t n = a.size() + b.size();
    UTestResult res;
    res.n1 = a.size();
    res.n2 = b.size();
    res.exact = true;
    res.u_statistic = u_of_first(r, a.size());

    // Null distribution of the doubled rank sum of the smaller sample:
    // count subsets of the pooled doubled midranks by their sum. The
    // deviation from the expected sum is the same for either sample.
    std::vector<std::int64_t> doubled(n);
    std::int64_t max_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        doubled[i] = std::llround(2.0 * r.ranks[i]);
        max_sum += doubled[i];
    }
    const bool first_smaller = a.size() <= b.size();
    const std::size_t m = first_smaller ? a.size() : b.size();
    std::vector<std::vector<double>> ways(m + 1, std::vector<double>(std::size_t(max_sum) + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto w = std::size_t(doubled[i]);
        for (std::size_t j = std::min(i + 1, m); j >= 1; --j) {
            auto& dst = ways[j];
            const auto& src = ways[j - 1];
            for (std::size_t s = std::size_t(max_sum); s >= w; --s) {
                if (src[s - w] != 0.0) dst[s] += src[s - w];
                if (s == w) break;
            }
        }
    }
    std::int64_t observed = 0;
    const std::size_t begin = first_smaller ? 0 : a.size();
    for (std::size_t i = begin; i < begin + m; ++i) observed += doubled[i];
    // Expected doubled rank sum of the smaller sample: m * (n + 1).
    const std::int64_t expected = std::int64_t(m) * std::int64_t(n + 1);
    const std::int64_t dev = std::llabs(observed - expected);

    double extreme = 0.0, total = 0.0;
    for (std::int64_t s = 0; s <= max_sum; ++s) {
        const double c = ways[m][std::size_t(s)];
        if (c == 0.0) continue;
        total += c;
        if (std::llabs(s - expected) >= dev) extreme += c;
    }
    res.p = std::clamp(extreme / total, 0.0, 1.0);
    return res;
}

std::size_t bin_index(double value, std::size_t n_bins) {
    if (!(value >= 0.0 && value <= 1.0)) throw UndefinedStatistic("entropy: value outside [0,1]");
    return std::min(static_cast<std::size_t>(value * double(n_bins)), n_bins - 1);
}

double shannon_entropy(std::span<const double> values, std::size_t n_bins) {
    if (values.empty()) throw UndefinedStatistic("entropy of an empty sample");
    if (n_bins < 2) throw UndefinedStatistic("entropy needs at least 2 bins");
    std::vector<std::uint64_t> counts(n_bins, 0);
    for (double v : values) ++counts[bin_index(v, n_bins)];
    return shannon_entropy_counts(counts);
}

double shannon_entropy_counts(std::span<const std::uint64_t> counts) {
    const double total = double(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
    if (total == 0.0) throw UndefinedStatistic("entropy of an empty histogram");
    CompensatedSum h;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = double(c) / total;
        h.add(-p * std::log2(p));
    }
    return std::max(0.0, h.value());
}

BootstrapInterval bootstrap_mean_ci(std::span<const double> sample, std::size_t reps, double confidence,
                                    Stream& rng) {
    if (sample.empty()) throw UndefinedStatistic("bootstrap of an empty sample");
    if (reps == 0) throw UndefinedStatistic("bootstrap needs at least one replicate");
    std::vector<double> means(reps);
    for (auto& m : means) {
        CompensatedSum s;
        for (std::size_t i = 0; i < sample.size(); ++i) s.add(sample[rng.below(sample.size())]);
        m = s.value() / double(sample.size());
    }
    std::sort(means.begin(), means.end());
    const double alpha = (1.0 - confidence) / 2.0;
    auto at = [&](double q) {
        const auto idx = static_cast<std::size_t>(std::clamp(q * double(reps - 1), 0.0, double(reps - 1)));
        return means[idx];
    };
    return {mean_of(sample), at(alpha), at(1.0 - alpha)};
}

double student_t_cdf(double t, double dof) {
    boost::math::students_t dist(dof);
    return boost::math::cdf(dist, t);
}

double normal_cdf(double z) { return boost::math::cdf(boost::math::normal(), z); }

double ols_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw UndefinedStatistic("slope needs two or more paired points");
    const double mx = mean_of(x), my = mean_of(y);
    CompensatedSum sxy, sxx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy.add((x[i] - mx) * (y[i] - my));
        sxx.add((x[i] - mx) * (x[i] - mx));
    }
    if (sxx.value() == 0.0) throw UndefinedStatistic("slope: constant x");
    return sxy.value() / sxx.value();
}

std::string format_p(double p) {
    if (p < 0.001) return "p<0.001";
    return fmt::format("p={:.3f}", p);
}

}  // namespace echoscope
