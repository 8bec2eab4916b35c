#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "echoscope/stats.hpp"
#include "stat_oracles.hpp"

using namespace echoscope;

using namespace testing;


TEST_CASE("pearson basics") {
    const std::vector<double> x{1, 2, 3}, y{3, 2, 1};
    CHECK(pearson(x, x).r == doctest::Approx(1.0));
    CHECK(pearson(x, y).r == doctest::Approx(-1.0));
    CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 1, 1}), UndefinedStatistic);
    CHECK_THROWS(pearson(x, std::vector<double>{1, 2}));
}

TEST_CASE("pearson matches the direct formula") {
    Stream rng(1, StreamOp::Test, 20);
    for (int t = 0; t < 1000; ++t) {
        const auto n = 3 + rng.below(60);
        std::vector<double> x(n), y(n);
        const double rho = rng.uniform() * 2 - 1;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.normal() * 3 + 10;
            y[i] = rho * x[i] + rng.normal();
        }
        const auto r = pearson(x, y);
        CHECK(std::abs(r.r - double(direct_pearson(x, y))) < 1e-10);
        CHECK(r.p >= 0.0);
        CHECK(r.p <= 1.0);
        // Symmetric and invariant under positive affine maps.
        CHECK(std::abs(pearson(y, x).r - r.r) < 1e-12);
        std::vector<double> z(n);
        for (std::size_t i = 0; i < n; ++i) z[i] = 2.5 * x[i] - 7;
        CHECK(std::abs(pearson(z, y).r - r.r) < 1e-10);
    }
}

TEST_CASE("pearson p-value from the t distribution") {
    // Two-sided p from t = r*sqrt((n-2)/(1-r^2)) with n-2 degrees of freedom.
    std::vector<double> x, y;
    Stream rng(2, StreamOp::Test, 21);
    for (int i = 0; i < 20; ++i) {
        x.push_back(rng.normal());
        y.push_back(0.6 * x.back() + rng.normal());
    }
    const auto c = pearson(x, y);
    const double t = c.r * std::sqrt(18.0 / (1 - c.r * c.r));
    CHECK(c.p == doctest::Approx(2 * (1 - student_t_cdf(std::abs(t), 18))).epsilon(1e-12));
    CHECK(student_t_cdf(0.0, 5) == doctest::Approx(0.5));
    CHECK(student_t_cdf(2.015048, 5) == doctest::Approx(0.95).epsilon(1e-6));
    CHECK(normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
}

TEST_CASE("mann-whitney extremes and symmetry") {
    const std::vector<double> a{1, 2, 3, 4};
    CHECK(mann_whitney_u(a, a).u_statistic == 8.0);
    const std::vector<double> hi{10, 11, 12}, lo{1, 2};
    CHECK(mann_whitney_u(hi, lo).u_statistic == 6.0);
    CHECK(mann_whitney_u(lo, hi).u_statistic == 0.0);
    CHECK_THROWS_AS(mann_whitney_u(std::vector<double>{}, lo), UndefinedStatistic);
}

TEST_CASE("mann-whitney exact p equals permutation enumeration for n <= 5") {
    Stream rng(3, StreamOp::Test, 22);
    for (int t = 0; t < 300; ++t) {
        const auto n1 = 1 + rng.below(5), n2 = 1 + rng.below(5);
        const auto levels = 2 + rng.below(10);
        std::vector<double> a(n1), b(n2);
        for (auto& x : a) x = double(rng.below(levels));
        for (auto& x : b) x = double(rng.below(levels));
        const auto r = mann_whitney_u(a, b);
        CHECK(r.exact);
        CHECK(r.u_statistic == pair_u(a, b));
        CHECK(std::abs(r.p - permutation_p(a, b)) < 1e-9);
    }
}

TEST_CASE("mann-whitney exact p on larger tied samples") {
    const std::vector<double> a{1, 1, 1, 1, 1, 0, 0, 1, 1, 0}, b{0, 1, 1, 0, 1, 0, 1, 1, 0};
    CHECK(std::abs(mann_whitney_u_exact(a, b).p - permutation_p(a, b)) < 1e-9);
}

TEST_CASE("U_a + U_b = n1 n2") {
    Stream rng(4, StreamOp::Test, 23);
    for (int t = 0; t < 2000; ++t) {
        const auto n1 = 1 + rng.below(40), n2 = 1 + rng.below(40);
        std::vector<double> a(n1), b(n2);
        const bool ties = rng.bernoulli(0.5);
        for (auto& x : a) x = ties ? double(rng.below(5)) : rng.normal();
        for (auto& x : b) x = ties ? double(rng.below(5)) : rng.normal() + 0.3;
        const auto ab = mann_whitney_u(a, b), ba = mann_whitney_u(b, a);
        CHECK(ab.u_statistic + ba.u_statistic == double(n1 * n2));
        CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
        CHECK(ab.p >= 0.0);
        CHECK(ab.p <= 1.0);
    }
}

TEST_CASE("exact and normal p agree where the approximation applies") {
    // Both branches apply below the exact-size limit; the normal form is
    // accurate once each sample has at least 10 distinct observations.
    Stream rng(5, StreamOp::Test, 24);
    for (int t = 0; t < 2000; ++t) {
        const auto n1 = 10 + rng.below(11), n2 = 10 + rng.below(11);
        if (n1 * n2 > kMannWhitneyExactLimit) continue;
        std::vector<double> a(n1), b(n2);
        const double shift = rng.uniform() * 2;
        for (auto& x : a) x = rng.normal() + shift;
        for (auto& x : b) x = rng.normal();
        CHECK(std::abs(mann_whitney_u_exact(a, b).p - mann_whitney_u_normal(a, b).p) < 0.01);
    }
}

TEST_CASE("large samples use the normal approximation") {
    std::vector<double> a(30), b(30);
    std::iota(a.begin(), a.end(), 0.0);
    std::iota(b.begin(), b.end(), 15.0);
    const auto r = mann_whitney_u(a, b);
    CHECK_FALSE(r.exact);
    CHECK(r.p < 0.01);
}

TEST_CASE("entropy values") {
    CHECK(shannon_entropy(std::vector<double>{0.1, 0.15, 0.12}, 5) == 0.0);
    CHECK(shannon_entropy(std::vector<double>{0.1, 0.9}, 2) == 1.0);
    const std::vector<std::uint64_t> c31{3, 1};
    const double expect = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
    CHECK(shannon_entropy_counts(c31) == doctest::Approx(expect).epsilon(1e-15));
    CHECK(shannon_entropy_counts(c31) == doctest::Approx(0.8113).epsilon(1e-4));
    CHECK(bin_index(1.0, 5) == 4);
    CHECK(bin_index(0.0, 5) == 0);
    CHECK(bin_index(0.2, 5) == 1);
    CHECK_THROWS_AS(shannon_entropy(std::vector<double>{}, 5), UndefinedStatistic);
}

TEST_CASE("entropy is bounded, permutation-invariant and maximal when uniform") {
    Stream rng(6, StreamOp::Test, 25);
    for (int t = 0; t < 2000; ++t) {
        const auto bins = 2 + rng.below(9);
        std::vector<double> v(1 + rng.below(50));
        for (auto& x : v) x = rng.uniform();
        const double h = shannon_entropy(v, bins);
        CHECK(h >= 0.0);
        CHECK(h <= std::log2(double(bins)) + 1e-12);
        auto w = v;
        std::reverse(w.begin(), w.end());
        std::swap(w[0], w[w.size() / 2]);
        CHECK(shannon_entropy(w, bins) == h);
        std::vector<std::uint64_t> uniform(bins, 3);
        CHECK(shannon_entropy_counts(uniform) == doctest::Approx(std::log2(double(bins))));
    }
}

TEST_CASE("ols slope, bootstrap and p formatting") {
    const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
    CHECK(ols_slope(x, y) == doctest::Approx(2.0));
    Stream rng(7, StreamOp::Bootstrap, 0);
    std::vector<double> s(200);
    for (auto& v : s) v = rng.normal() + 5;
    Stream boot(7, StreamOp::Bootstrap, 1);
    const auto ci = bootstrap_mean_ci(s, 1000, 0.95, boot);
    CHECK(ci.lo < ci.mean);
    CHECK(ci.mean < ci.hi);
    CHECK(ci.lo > 4.5);
    CHECK(ci.hi < 5.5);
    CHECK(format_p(0.0004) == "p<0.001");
    CHECK(format_p(0.0123) == "p=0.012");
}
