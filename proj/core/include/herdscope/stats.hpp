#pragma once

#include <optional>
#include <span>

namespace herdscope {

/// Product-moment correlation. Undefined for fewer than three pairs or when
/// either side has zero variance. Throws std::invalid_argument on a length
/// mismatch.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> x);

/// Sample (n-1) standard deviation; undefined for fewer than two values.
std::optional<double> sample_sd(std::span<const double> x);

/// Sample standard deviation over mean. Undefined for fewer than two
/// values or a zero mean.
std::optional<double> coefficient_of_variation(std::span<const double> x);

/// Linear-interpolation percentile (the "type 7" definition), pct in [0,100].
double percentile(std::span<const double> x, double pct);

/// Two-sided p-value of a Student-t statistic.
double student_t_two_sided_p(double t, double degrees_of_freedom);

/// Two-sided p-value of a standard normal statistic.
double normal_two_sided_p(double z);

}  // namespace herdscope
