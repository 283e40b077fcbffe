#include "hetnet/geometry.hpp"

#include <algorithm>
#include <numeric>

namespace hetnet {

void SimParams::validate() const
{
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw InvalidArgument(std::string(field) + ": " + what);
    };
    require(num_groups > 0, "N_u", "must be positive");
    require(num_small_cells >= 0, "N_f", "must be nonnegative");
    require(num_small_cells <= num_groups, "N_f", "must not exceed N_u");
    require(cell_radius > 0, "R_mc", "must be positive");
    require(exclusion_radius > 0, "R_excl", "must be positive");
    require(exclusion_radius < cell_radius, "R_excl", "must be smaller than R_mc");
    require(cutoff_distance > 0, "d_0", "must be positive");
    require(pathloss_exponent > 0, "alpha", "must be positive");
    require(wall_loss_db >= 0, "w_db", "must be nonnegative");
    require(loading > 0 && loading < 1, "beta", "must lie in (0, 1)");
    require(macro_antennas > 0, "M", "must be positive");
    require(small_cell_antennas > 0, "L", "must be positive");
    require(static_cast<int>(loading * small_cell_antennas) >= 1, "L",
            "beta * L must give at least one small-cell stream");
    require(scattering_radius > 0, "R_u", "must be positive");
    require(scattering_radius < exclusion_radius, "R_u", "must be smaller than R_excl");
    require(max_groups > 0, "G", "must be positive");
    require(eps1 >= 0 && eps2 >= 0, "epsilon1/epsilon2", "must be nonnegative");
    require(gamma >= 0, "gamma", "must be nonnegative");
    require(slots_per_drop > 0, "slots_per_drop", "must be positive");
    require(num_drops > 0, "n_drops", "must be positive");
    require(rank_threshold > 0 && rank_threshold < 1, "rank_threshold", "must lie in (0, 1)");
}

std::string_view to_string(DeploymentMode mode)
{
    switch (mode) {
    case DeploymentMode::Uniform: return "uniform";
    case DeploymentMode::Interior: return "interior";
    case DeploymentMode::Edge: return "edge";
    }
    return "uniform";
}

DeploymentMode parse_deployment(std::string_view text)
{
    if (text == "uniform") return DeploymentMode::Uniform;
    if (text == "interior") return DeploymentMode::Interior;
    if (text == "edge") return DeploymentMode::Edge;
    throw InvalidArgument("unknown deployment mode '" + std::string(text) + "'");
}

void Layout::set_small_cells(std::vector<int> cells)
{
    std::sort(cells.begin(), cells.end());
    if (std::adjacent_find(cells.begin(), cells.end()) != cells.end())
        throw InvalidArgument("small-cell set contains duplicates");
    membership_.assign(positions.size(), 0);
    for (int g : cells) {
        if (g < 0 || g >= size()) throw InvalidArgument("small-cell id out of range");
        membership_[g] = 1;
    }
    smallcell_set = std::move(cells);
    macro_set.clear();
    for (int g = 0; g < size(); ++g)
        if (!membership_[g]) macro_set.push_back(g);
}

double angular_spread(double dist_macro, double scattering_radius)
{
    if (!(dist_macro > scattering_radius))
        throw InvalidArgument("angular_spread: group distance must exceed the scattering radius");
    return std::atan(scattering_radius / dist_macro);
}

namespace {

void derive_angles(Layout& layout, const SimParams& params)
{
    const auto n = layout.positions.size();
    layout.theta.resize(n);
    layout.dist_macro.resize(n);
    layout.delta.resize(n);
    for (std::size_t g = 0; g < n; ++g) {
        const auto& p = layout.positions[g];
        double th = std::atan2(p.y(), p.x());
        if (th >= kPi) th -= 2 * kPi;
        layout.theta[g] = th;
        layout.dist_macro[g] = p.norm();
        layout.delta[g] = angular_spread(layout.dist_macro[g], params.scattering_radius);
    }
}

} // namespace

Layout sample_layout(const SimParams& params, Rng& rng)
{
    params.validate();
    const double r2_lo = params.exclusion_radius * params.exclusion_radius;
    const double r2_hi = params.cell_radius * params.cell_radius;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(-kPi, kPi);

    Layout layout;
    layout.positions.reserve(params.num_groups);
    for (int g = 0; g < params.num_groups; ++g) {
        const double r = std::sqrt(r2_lo + unit(rng) * (r2_hi - r2_lo));
        const double phi = angle(rng);
        layout.positions.emplace_back(r * std::cos(phi), r * std::sin(phi));
    }
    derive_angles(layout, params);
    layout.set_small_cells({});
    return layout;
}

Layout make_layout(const std::vector<Eigen::Vector2d>& positions, const std::vector<int>& small_cells,
                   const SimParams& params)
{
    Layout layout;
    layout.positions = positions;
    derive_angles(layout, params);
    layout.set_small_cells(small_cells);
    return layout;
}

Layout assign_small_cells(Layout layout, DeploymentMode mode, int num_small_cells, const SimParams& params,
                          Rng& rng)
{
    const int n = layout.size();
    if (num_small_cells < 0 || num_small_cells > n)
        throw InvalidArgument("assign_small_cells: num_small_cells must lie in [0, num_groups]");
    (void)params;

    std::vector<int> chosen;
    if (num_small_cells == n) {
        chosen.resize(n);
        std::iota(chosen.begin(), chosen.end(), 0);
    } else if (mode == DeploymentMode::Uniform) {
        // partial Fisher-Yates: every subset of the requested size equally likely
        std::vector<int> ids(n);
        std::iota(ids.begin(), ids.end(), 0);
        for (int i = 0; i < num_small_cells; ++i) {
            std::uniform_int_distribution<int> pick(i, n - 1);
            std::swap(ids[i], ids[pick(rng)]);
        }
        chosen.assign(ids.begin(), ids.begin() + num_small_cells);
    } else {
        // Successive weighted draws without replacement, realised with
        // exponential keys log(u)/w. Weight = target density / area density,
        // i.e. 1/r for interior (target ~ const) and r for edge (target ~ r^2).
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<std::pair<double, int>> keys(n);
        for (int g = 0; g < n; ++g) {
            const double r = layout.dist_macro[g];
            const double w = mode == DeploymentMode::Interior ? 1.0 / r : r;
            double u = unit(rng);
            while (u <= 0.0) u = unit(rng);
            keys[g] = {std::log(u) / w, g};
        }
        std::partial_sort(keys.begin(), keys.begin() + num_small_cells, keys.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first; });
        for (int i = 0; i < num_small_cells; ++i) chosen.push_back(keys[i].second);
    }
    layout.set_small_cells(std::move(chosen));
    return layout;
}

double deployment_cdf(DeploymentMode mode, double r, double r_min, double r_max)
{
    if (r <= r_min) return 0.0;
    if (r >= r_max) return 1.0;
    switch (mode) {
    case DeploymentMode::Interior: return (r - r_min) / (r_max - r_min);
    case DeploymentMode::Uniform: return (r * r - r_min * r_min) / (r_max * r_max - r_min * r_min);
    case DeploymentMode::Edge:
        return (r * r * r - r_min * r_min * r_min) / (r_max * r_max * r_max - r_min * r_min * r_min);
    }
    return 0.0;
}

} // namespace hetnet
