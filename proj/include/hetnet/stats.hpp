#ifndef HETNET_STATS_HPP
#define HETNET_STATS_HPP

#include <functional>
#include <span>
#include <vector>

namespace hetnet {

double mean(std::span<const double> x);

/// Unbiased sample standard deviation; zero for fewer than two samples.
double sample_sd(std::span<const double> x);

/// Normal-approximation half-width z * sd / sqrt(n).
double half_width(std::span<const double> x, double z = 1.96);

/// sup |F_n - F| of the empirical CDF of `samples` against `cdf`.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

} // namespace hetnet

#endif // HETNET_STATS_HPP
