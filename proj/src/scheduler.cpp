#include "hetnet/scheduler.hpp"

#include <algorithm>
#include <limits>

namespace hetnet {

bool angular_interval_disjoint(int g, int gp, const std::vector<GroupChannelModel>& models)
{
    return disjoint(models.at(g).interval, models.at(gp).interval);
}

std::vector<int> select_user_groups(const ScheduleState& state, std::span<const int> candidates, int max_groups,
                                    const LinkGainTable& table, const TransmitPowers& powers, Rng& rng)
{
    if (candidates.empty()) throw InvalidArgument("select_user_groups: no candidate groups");
    std::vector<int> pool(candidates.begin(), candidates.end());
    std::sort(pool.begin(), pool.end());
    if (max_groups < 1) throw InvalidArgument("select_user_groups: max_groups must be positive");
    const auto& models = table.macro().models;
    auto priority = [&](int g) { return state.priorities.at(g); };

    long top = std::numeric_limits<long>::min();
    for (int g : pool) top = std::max(top, priority(g));
    std::vector<int> best;
    for (int g : pool)
        if (priority(g) == top) best.push_back(g);
    std::uniform_int_distribution<std::size_t> pick(0, best.size() - 1);
    const int seed = best[pick(rng)];

    std::vector<int> selected{seed};
    int streams = table.streams(seed);
    std::vector<int> residual;
    for (int g : pool)
        if (g != seed) residual.push_back(g);

    while (static_cast<int>(selected.size()) < max_groups) {
        std::vector<int> compatible;
        for (int gp : residual) {
            bool ok = true;
            for (int g : selected) ok = ok && angular_interval_disjoint(gp, g, models);
            if (ok) compatible.push_back(gp);
        }
        residual = std::move(compatible);
        if (residual.empty()) break;

        long cmax = std::numeric_limits<long>::min();
        for (int gp : residual) cmax = std::max(cmax, priority(gp));
        int chosen = -1;
        double chosen_cost = std::numeric_limits<double>::infinity();
        for (int gp : residual) {  // candidates are visited in ascending id order
            if (priority(gp) != cmax) continue;
            const double share = powers.macro * table.streams(gp) / (streams + table.streams(gp));
            double worst = 0.0;
            for (int g : selected) worst = std::max(worst, share * table.i_mc(g, gp));
            if (chosen < 0 || worst < chosen_cost) {
                chosen = gp;
                chosen_cost = worst;
            }
        }
        selected.push_back(chosen);
        streams += table.streams(chosen);
        residual.erase(std::find(residual.begin(), residual.end(), chosen));
        if (residual.empty()) break;
    }
    return selected;
}

void update_priorities(ScheduleState& state, std::span<const int> schedulable, std::span<const int> selected)
{
    for (int g : schedulable)
        if (std::find(selected.begin(), selected.end(), g) == selected.end()) ++state.priorities.at(g);
}

} // namespace hetnet
