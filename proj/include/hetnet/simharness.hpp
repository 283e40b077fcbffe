#ifndef HETNET_SIMHARNESS_HPP
#define HETNET_SIMHARNESS_HPP

#include "hetnet/coordination.hpp"
#include "hetnet/scheduler.hpp"

#include <memory>
#include <string_view>
#include <vector>

namespace hetnet {

enum class Policy { None, OnOff, Offload, Tin };

std::string_view to_string(Policy policy);
Policy parse_policy(std::string_view text);

enum class GroupKind { Macro, SmallCell, Offloaded };

std::string_view to_string(GroupKind kind);

/// Everything fixed over the slots of one drop.
struct DropSetup {
    Layout layout;
    LinkGainTable table;
    TransmitPowers powers;
};

/// Attaches a small-cell set to precomputed macro statistics of the same positions.
DropSetup prepare_drop(Layout layout, std::shared_ptr<const MacroStatistics> macro, const SimParams& params);

struct SlotRecord {
    std::vector<int> macro_groups;
    std::vector<int> active_cells;
    std::vector<double> macro_sinr;  // aligned with macro_groups
    std::vector<double> cell_sinr;   // own-group SINR, aligned with active_cells
};

struct DropResult {
    std::vector<double> group_rate;  // long-term, bit/s/Hz per group
    std::vector<GroupKind> group_kind;
    std::vector<int> offload_target;
    double macro_total = 0.0;
    double sc_total = 0.0;
    double offload_fraction = 0.0;
    std::vector<SlotRecord> slots;   // only when requested
    std::uint64_t seed = 0;
};

struct SlotOptions {
    bool record = false;
    /// Checks every TIN selection against the TIN condition and for maximality.
    bool check_tin = false;
};

/// Runs the slot loop of one drop. `rng` drives the random tie-breaks of the
/// macro scheduler.
DropResult simulate_slots(const DropSetup& setup, Policy policy, const SimParams& params, Rng& rng,
                          SlotOptions options = {});

/// Samples a layout, places small cells, builds all gains and runs the slots.
DropResult run_drop(const SimParams& params, DeploymentMode deployment, Policy policy, Rng& rng,
                    SlotOptions options = {});

/// True if no left-out candidate can join the selection without breaking the
/// TIN condition (macro candidates only while fewer than `max_groups` are served).
bool tin_selection_is_maximal(const TinSelection& selection, std::span<const int> macro_candidates,
                              std::span<const int> cell_candidates, int max_groups, const LinkGainTable& table,
                              const TransmitPowers& powers);

struct Summary {
    double macro_total = 0.0;
    double sc_total = 0.0;
    double macro_half_width = 0.0;  // 95% normal-approximation half-widths
    double sc_half_width = 0.0;
    double offload_fraction = 0.0;
    double offload_half_width = 0.0;
    std::vector<std::pair<GroupKind, double>> rates;  // pooled per-group rates, sorted by rate
    int drops = 0;
};

Summary aggregate(const std::vector<DropResult>& drops);

} // namespace hetnet

#endif // HETNET_SIMHARNESS_HPP
