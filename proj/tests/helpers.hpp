#ifndef HETNET_TEST_HELPERS_HPP
#define HETNET_TEST_HELPERS_HPP

#include "hetnet/simharness.hpp"

#include <memory>

namespace testing {

// Layout plus every gain built from it, for tests that need a full drop.
struct Scenario {
    hetnet::SimParams params;
    hetnet::DropSetup setup;

    const hetnet::Layout& layout() const { return setup.layout; }
    const hetnet::LinkGainTable& table() const { return setup.table; }
    const hetnet::TransmitPowers& powers() const { return setup.powers; }
};

inline Scenario random_scenario(hetnet::SimParams params, std::uint64_t seed,
                                hetnet::DeploymentMode mode = hetnet::DeploymentMode::Uniform)
{
    hetnet::Rng rng(seed);
    hetnet::Layout layout = hetnet::sample_layout(params, rng);
    layout = hetnet::assign_small_cells(std::move(layout), mode, params.num_small_cells, params, rng);
    auto macro = std::make_shared<const hetnet::MacroStatistics>(hetnet::build_macro_statistics(layout, params));
    return Scenario{params, hetnet::prepare_drop(std::move(layout), std::move(macro), params)};
}

inline Scenario explicit_scenario(hetnet::SimParams params, const std::vector<Eigen::Vector2d>& positions,
                                  const std::vector<int>& cells)
{
    hetnet::Layout layout = hetnet::make_layout(positions, cells, params);
    auto macro = std::make_shared<const hetnet::MacroStatistics>(hetnet::build_macro_statistics(layout, params));
    return Scenario{params, hetnet::prepare_drop(std::move(layout), std::move(macro), params)};
}

// Small, fast parameter set for property tests.
inline hetnet::SimParams small_params(int groups = 60, int cells = 12)
{
    hetnet::SimParams p;
    p.num_groups = groups;
    p.num_small_cells = cells;
    p.macro_antennas = 32;
    p.small_cell_antennas = 8;
    p.slots_per_drop = 40;
    return p;
}

inline Eigen::Vector2d polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }

// Two-group toy: macro group 0.2 km out on the x axis, small-cell group 1 at (r, theta).
inline Scenario toy_scenario(hetnet::SimParams params, double r, double theta)
{
    params.num_groups = 2;
    params.num_small_cells = 1;
    return explicit_scenario(params, {polar(200.0, 0.0), polar(r, theta)}, {1});
}

} // namespace testing

#endif
