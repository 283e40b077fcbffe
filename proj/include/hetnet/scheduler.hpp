#ifndef HETNET_SCHEDULER_HPP
#define HETNET_SCHEDULER_HPP

#include "hetnet/detequiv.hpp"

#include <span>
#include <vector>

namespace hetnet {

/// Slot-to-slot scheduling state. Priorities start at 1; `offload_target[g]`
/// is the small cell absorbing macro group g, or -1.
struct ScheduleState {
    std::vector<long> priorities;
    std::vector<int> selected;       // G, in selection order
    std::vector<int> active_cells;   // S_A
    std::vector<int> offload_target;
    int total_streams = 0;

    ScheduleState() = default;
    explicit ScheduleState(int num_groups) : priorities(num_groups, 1), offload_target(num_groups, -1) {}
};

/// Closed-interval disjointness of the angular supports of two groups.
bool angular_interval_disjoint(int g, int gp, const std::vector<GroupChannelModel>& models);

/// Greedy priority-first, least-interference selection of at most `max_groups`
/// mutually interval-disjoint groups among `candidates`.
std::vector<int> select_user_groups(const ScheduleState& state, std::span<const int> candidates, int max_groups,
                                    const LinkGainTable& table, const TransmitPowers& powers, Rng& rng);

/// Every schedulable group left out of `selected` gains one priority unit.
void update_priorities(ScheduleState& state, std::span<const int> schedulable, std::span<const int> selected);

} // namespace hetnet

#endif // HETNET_SCHEDULER_HPP
