#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace echoscope {

/// Dense index of a user inside a UserRegistry.
using UserId = std::uint32_t;
inline constexpr UserId kNoUser = std::numeric_limits<UserId>::max();

/// Bad input data or arguments. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inclusive timestamp range in seconds since epoch.
struct Window {
    std::int64_t from = std::numeric_limits<std::int64_t>::min();
    std::int64_t to = std::numeric_limits<std::int64_t>::max();

    bool contains(std::int64_t ts) const { return ts >= from && ts <= to; }
    bool unbounded() const {
        return from == std::numeric_limits<std::int64_t>::min() &&
               to == std::numeric_limits<std::int64_t>::max();
    }
    bool operator==(const Window&) const = default;
};

/// Parses "FROM..TO"; either side may be empty for an open bound.
Window parse_window(const std::string& text);
std::string format_window(const Window& w);

/// Neumaier-compensated accumulator. Results do not depend on the
/// reduction order beyond the last ulp for well-conditioned inputs.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    void merge(const CompensatedSum& other) {
        add(other.sum_);
        add(other.comp_);
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace echoscope
