#include "hetnet/simharness.hpp"
#include "hetnet/stats.hpp"

#include <algorithm>
#include <cmath>

namespace hetnet {

std::string_view to_string(Policy policy)
{
    switch (policy) {
    case Policy::None: return "none";
    case Policy::OnOff: return "onoff";
    case Policy::Offload: return "offload";
    case Policy::Tin: return "tin";
    }
    return "none";
}

Policy parse_policy(std::string_view text)
{
    if (text == "none") return Policy::None;
    if (text == "onoff") return Policy::OnOff;
    if (text == "offload") return Policy::Offload;
    if (text == "tin") return Policy::Tin;
    throw InvalidArgument("unknown policy '" + std::string(text) + "'");
}

std::string_view to_string(GroupKind kind)
{
    switch (kind) {
    case GroupKind::Macro: return "macro";
    case GroupKind::SmallCell: return "smallcell";
    case GroupKind::Offloaded: return "offloaded";
    }
    return "macro";
}

DropSetup prepare_drop(Layout layout, std::shared_ptr<const MacroStatistics> macro, const SimParams& params)
{
    LinkGainTable table(std::move(macro), layout, params);
    return DropSetup{std::move(layout), std::move(table), transmit_powers(params)};
}

bool tin_selection_is_maximal(const TinSelection& selection, std::span<const int> macro_candidates,
                              std::span<const int> cell_candidates, int max_groups, const LinkGainTable& table,
                              const TransmitPowers& powers)
{
    auto chosen = [](const std::vector<int>& set, int g) { return std::find(set.begin(), set.end(), g) != set.end(); };
    if (static_cast<int>(selection.macro_groups.size()) < max_groups)
        for (int g : macro_candidates) {
            if (chosen(selection.macro_groups, g)) continue;
            std::vector<int> grown = selection.macro_groups;
            grown.push_back(g);
            if (tin_condition_holds(tin_links(grown, selection.cells, table, powers))) return false;
        }
    for (int f : cell_candidates) {
        if (chosen(selection.cells, f)) continue;
        std::vector<int> grown = selection.cells;
        grown.push_back(f);
        if (tin_condition_holds(tin_links(selection.macro_groups, grown, table, powers))) return false;
    }
    return true;
}

DropResult simulate_slots(const DropSetup& setup, Policy policy, const SimParams& params, Rng& rng,
                          SlotOptions options)
{
    const Layout& layout = setup.layout;
    const LinkGainTable& table = setup.table;
    const TransmitPowers& powers = setup.powers;
    const int n = layout.size();
    const int sc = table.sc_streams();

    DropResult out;
    out.group_rate.assign(n, 0.0);
    out.group_kind.assign(n, GroupKind::Macro);
    out.offload_target.assign(n, -1);
    for (int f : layout.smallcell_set) out.group_kind[f] = GroupKind::SmallCell;

    if (policy == Policy::Offload) out.offload_target = policy_offload(layout, table, params.gamma, powers);

    // Groups served by each small cell in TDMA: its own group first.
    std::vector<std::vector<int>> served(n);
    for (int f : layout.smallcell_set) served[f].push_back(f);
    std::vector<int> schedulable;
    int offloaded = 0;
    for (int g : layout.macro_set) {
        if (out.offload_target[g] >= 0) {
            served[out.offload_target[g]].push_back(g);
            out.group_kind[g] = GroupKind::Offloaded;
            ++offloaded;
        } else {
            schedulable.push_back(g);
        }
    }
    out.offload_fraction = layout.macro_set.empty() ? 0.0 : double(offloaded) / layout.macro_set.size();

    ScheduleState state(n);
    std::vector<int> tin_pool = schedulable;
    tin_pool.insert(tin_pool.end(), layout.smallcell_set.begin(), layout.smallcell_set.end());

    for (int slot = 0; slot < params.slots_per_drop; ++slot) {
        std::vector<int> groups, cells;
        if (policy == Policy::Tin) {
            if (!tin_pool.empty()) {
                const TinSelection sel =
                    tin_select(state.priorities, schedulable, layout.smallcell_set, params.max_groups, table, powers);
                if (options.check_tin) {
                    if (!tin_condition_holds(tin_links(sel.macro_groups, sel.cells, table, powers)))
                        throw Error("TIN selection violates the TIN condition");
                    if (!tin_selection_is_maximal(sel, schedulable, layout.smallcell_set, params.max_groups, table,
                                                  powers))
                        throw Error("TIN selection is not maximal");
                }
                groups = sel.macro_groups;
                cells = sel.cells;
                std::vector<int> picked = groups;
                picked.insert(picked.end(), cells.begin(), cells.end());
                update_priorities(state, tin_pool, picked);
            }
        } else {
            if (!schedulable.empty()) {
                groups = select_user_groups(state, schedulable, params.max_groups, table, powers, rng);
                update_priorities(state, schedulable, groups);
            }
            cells = policy == Policy::OnOff
                        ? policy_onoff(groups, layout.smallcell_set, table, params.eps1, params.eps2, powers)
                        : policy_none(layout);
        }
        std::sort(cells.begin(), cells.end());

        SlotRecord record;
        for (int g : groups) {
            const double sinr = macro_sinr_de(g, groups, cells, table, powers);
            out.group_rate[g] += table.streams(g) * std::log2(1.0 + sinr);
            if (options.record) record.macro_sinr.push_back(sinr);
        }
        for (int f : cells) {
            const double share = 1.0 / served[f].size();
            for (int v : served[f]) {
                const double sinr = smallcell_sinr_de(v, f, groups, cells, table, powers);
                out.group_rate[v] += share * sc * std::log2(1.0 + sinr);
                if (options.record && v == f) record.cell_sinr.push_back(sinr);
            }
        }
        if (options.record) {
            record.macro_groups = std::move(groups);
            record.active_cells = std::move(cells);
            out.slots.push_back(std::move(record));
        }
    }

    for (int g = 0; g < n; ++g) {
        out.group_rate[g] /= params.slots_per_drop;
        (out.group_kind[g] == GroupKind::Macro ? out.macro_total : out.sc_total) += out.group_rate[g];
    }
    return out;
}

DropResult run_drop(const SimParams& params, DeploymentMode deployment, Policy policy, Rng& rng, SlotOptions options)
{
    params.validate();
    Layout layout = sample_layout(params, rng);
    layout = assign_small_cells(std::move(layout), deployment, params.num_small_cells, params, rng);
    auto macro = std::make_shared<const MacroStatistics>(build_macro_statistics(layout, params));
    const DropSetup setup = prepare_drop(std::move(layout), std::move(macro), params);
    return simulate_slots(setup, policy, params, rng, options);
}

Summary aggregate(const std::vector<DropResult>& drops)
{
    if (drops.empty()) throw InvalidArgument("aggregate: no drops");
    std::vector<double> macro, sc, off;
    Summary s;
    for (const auto& d : drops) {
        macro.push_back(d.macro_total);
        sc.push_back(d.sc_total);
        off.push_back(d.offload_fraction);
        for (std::size_t g = 0; g < d.group_rate.size(); ++g) s.rates.emplace_back(d.group_kind[g], d.group_rate[g]);
    }
    std::stable_sort(s.rates.begin(), s.rates.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    s.drops = static_cast<int>(drops.size());
    s.macro_total = mean(macro);
    s.sc_total = mean(sc);
    s.offload_fraction = mean(off);
    s.macro_half_width = half_width(macro);
    s.sc_half_width = half_width(sc);
    s.offload_half_width = half_width(off);
    return s;
}

} // namespace hetnet
