#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "echoscope/rng.hpp"

namespace echoscope {

/// A statistic that is undefined for the given sample (zero variance,
/// too few points, empty input).
class UndefinedStatistic : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct CorrelationResult {
    double r = 0.0;
    double p = 1.0;
    std::size_t n = 0;
};

/// Product-moment correlation with a two-sided p from the t-transform
/// (n - 2 degrees of freedom). Needs n >= 3 and non-zero variance in both.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

struct UTestResult {
    /// U of the first sample: pairs (a_i, b_j) with a_i > b_j, ties counting 1/2.
    double u_statistic = 0.0;
    double p = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    bool exact = false;
};

/// Two-sided Mann-Whitney U. Exact null distribution (ties handled by
/// midranks) when n1 * n2 <= kExactLimit, otherwise normal approximation
/// with tie-corrected variance and continuity correction.
UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);
UTestResult mann_whitney_u_exact(std::span<const double> a, std::span<const double> b);
UTestResult mann_whitney_u_normal(std::span<const double> a, std::span<const double> b);
inline constexpr std::size_t kMannWhitneyExactLimit = 400;

/// Shannon entropy in bits of `values` in [0,1] binned into `n_bins`
/// equal-width bins; the last bin is closed on the right.
double shannon_entropy(std::span<const double> values, std::size_t n_bins);
/// Entropy in bits of a histogram.
double shannon_entropy_counts(std::span<const std::uint64_t> counts);
std::size_t bin_index(double value, std::size_t n_bins);

struct BootstrapInterval {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

/// Percentile bootstrap interval for the mean.
BootstrapInterval bootstrap_mean_ci(std::span<const double> sample, std::size_t reps, double confidence,
                                    Stream& rng);

/// Two-sided Student t tail helpers.
double student_t_cdf(double t, double dof);
double normal_cdf(double z);

/// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

/// Display rule for p-values: "p<0.001" below the threshold, else "p=0.xxx".
std::string format_p(double p);

}  // namespace echoscope
