#include "hetnet/coordination.hpp"

namespace hetnet {

std::vector<int> policy_none(const Layout& layout)
{
    return layout.smallcell_set;
}

std::vector<int> policy_onoff(std::span<const int> macro_groups, std::span<const int> cells, const LinkGainTable& table,
                              double eps1, double eps2, const TransmitPowers& powers)
{
    if (eps1 < 0 || eps2 < 0) throw InvalidArgument("policy_onoff: thresholds must be nonnegative");
    const int streams = total_streams(macro_groups, table);
    const double p = streams > 0 ? powers.macro / streams : 0.0;
    const double q = powers.small_cell / table.sc_streams();

    std::vector<int> on;
    for (int f : cells) {
        bool ok = true;
        if (!std::isinf(eps1)) {
            double received = 0.0;
            for (int g : macro_groups) received += table.streams(g) * table.j_mc(f, g);
            ok = p * received <= eps1 * table.d_sc(f) * q;
        }
        if (ok && !std::isinf(eps2))
            for (int g : macro_groups)
                if (!(table.j_sc(g, f) * powers.small_cell <= eps2 * table.d_mc(g) * p)) {
                    ok = false;
                    break;
                }
        if (ok) on.push_back(f);
    }
    return on;
}

std::vector<int> policy_offload(const Layout& layout, const LinkGainTable& table, double gamma,
                                const TransmitPowers& powers)
{
    if (gamma < 0) throw InvalidArgument("policy_offload: gamma must be nonnegative");
    std::vector<int> target(layout.size(), -1);
    if (layout.smallcell_set.empty() || std::isinf(gamma)) return target;
    const double q = powers.small_cell / table.sc_streams();
    for (int g : layout.macro_set) {
        int best = -1;
        for (int f : layout.smallcell_set)
            if (best < 0 || table.j_sc(g, f) > table.j_sc(g, best)) best = f;
        const double alone = table.d_mc(g) * powers.macro / table.streams(g);
        if (table.d_sc(g, best) * q > gamma * alone) target[g] = best;
    }
    return target;
}

bool tin_condition_holds(const TinLinkView& links)
{
    const Eigen::Index n = links.direct.size();
    if (links.cross.rows() != n || links.cross.cols() != n)
        throw InvalidArgument("tin_condition_holds: dimension mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
        double caused = 0.0, received = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            caused = std::max(caused, links.cross(j, i));
            received = std::max(received, links.cross(i, j));
        }
        if (!(links.direct(i) >= caused * received)) return false;
    }
    return true;
}

} // namespace hetnet
