#include "hetnet/stats.hpp"
#include "hetnet/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hetnet {

double mean(std::span<const double> x)
{
    if (x.empty()) throw InvalidArgument("mean: empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x)
{
    if (x.size() < 2) return 0.0;
    const double mu = mean(x);
    double acc = 0.0;
    for (double v : x) acc += (v - mu) * (v - mu);
    return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

double half_width(std::span<const double> x, double z)
{
    if (x.empty()) throw InvalidArgument("half_width: empty sample");
    return z * sample_sd(x) / std::sqrt(static_cast<double>(x.size()));
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf)
{
    if (samples.empty()) throw InvalidArgument("ks_distance: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

} // namespace hetnet
