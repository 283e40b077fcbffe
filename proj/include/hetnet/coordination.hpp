#ifndef HETNET_COORDINATION_HPP
#define HETNET_COORDINATION_HPP

#include "hetnet/detequiv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace hetnet {

/// No coordination: every small cell transmits.
std::vector<int> policy_none(const Layout& layout);

/// Small cells that pass both the received- and caused-interference tests
/// against the macro schedule. Infinite thresholds always pass.
std::vector<int> policy_onoff(std::span<const int> macro_groups, std::span<const int> cells, const LinkGainTable& table,
                              double eps1, double eps2, const TransmitPowers& powers);

/// For every macro group, the small cell absorbing it or -1. A group moves to
/// its strongest small cell when that cell's ZF gain beats gamma times the
/// gain of being served alone by the macro.
std::vector<int> policy_offload(const Layout& layout, const LinkGainTable& table, double gamma,
                                const TransmitPowers& powers);

/// Interference network of scheduled groups, one link per group. `cross(i, j)`
/// is the per-stream interference power at the receivers of link i caused by
/// the transmitter of link j; `direct(i)` the per-stream useful power.
struct TinLinkView {
    Eigen::VectorXd direct;
    Eigen::MatrixXd cross;
};

/// direct_i >= [max_j cross(j, i)] * [max_j cross(i, j)] for every link, with
/// empty maxima equal to zero.
bool tin_condition_holds(const TinLinkView& links);

/// Links induced by a macro schedule and an active small-cell set; macro
/// streams carry P0/S, small-cell streams P1/S.
template <typename Gains>
TinLinkView tin_links(std::span<const int> macro_groups, std::span<const int> cells, const Gains& gains,
                      const TransmitPowers& powers)
{
    int streams = 0;
    for (int g : macro_groups) streams += gains.streams(g);
    const double p = streams > 0 ? powers.macro / streams : 0.0;
    const double q = powers.small_cell / gains.sc_streams();
    const auto nm = static_cast<Eigen::Index>(macro_groups.size());
    const auto n = nm + static_cast<Eigen::Index>(cells.size());
    TinLinkView view{Eigen::VectorXd(n), Eigen::MatrixXd::Zero(n, n)};
    for (Eigen::Index i = 0; i < nm; ++i) {
        const int g = macro_groups[i];
        view.direct(i) = gains.d_mc(g) * p;
        for (Eigen::Index j = 0; j < nm; ++j)
            if (j != i) view.cross(i, j) = gains.i_mc(g, macro_groups[j]) * p;
        for (Eigen::Index j = nm; j < n; ++j) view.cross(i, j) = gains.j_sc(g, cells[j - nm]) * q;
    }
    for (Eigen::Index i = nm; i < n; ++i) {
        const int f = cells[i - nm];
        view.direct(i) = gains.d_sc(f) * q;
        for (Eigen::Index j = 0; j < nm; ++j) view.cross(i, j) = gains.j_mc(f, macro_groups[j]) * p;
        for (Eigen::Index j = nm; j < n; ++j)
            if (j != i) view.cross(i, j) = gains.i_sc(f, cells[j - nm]) * q;
    }
    return view;
}

struct TinSelection {
    std::vector<int> macro_groups;
    std::vector<int> cells;
};

namespace detail {

inline double tin_kappa(double signal, double caused, double received)
{
    const double den = caused * received;
    if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
    return signal / den;
}

} // namespace detail

/// Greedy TIN-feasible selection of macro groups and small cells. Candidate
/// lists hold group ids; `priorities` is indexed by group id across both tiers.
template <typename Gains>
TinSelection tin_select(const std::vector<long>& priorities, std::span<const int> macro_candidates,
                        std::span<const int> cell_candidates, int max_groups, const Gains& gains,
                        const TransmitPowers& powers)
{
    if (macro_candidates.empty() && cell_candidates.empty())
        throw InvalidArgument("tin_select: no candidate groups");
    if (max_groups < 1) throw InvalidArgument("tin_select: max_groups must be positive");

    std::vector<int> mres(macro_candidates.begin(), macro_candidates.end());
    std::vector<int> sres(cell_candidates.begin(), cell_candidates.end());
    std::sort(mres.begin(), mres.end());
    std::sort(sres.begin(), sres.end());
    const double q = powers.small_cell / gains.sc_streams();
    auto prio = [&](int g) { return priorities.at(g); };

    // Selected links with their running maxima (raw gains).
    struct Macro {
        int g;
        double recv_m, recv_s, cause_m, cause_s;
    };
    struct Cell {
        int f;
        double recv_m, recv_s, cause_m, cause_s;
    };
    std::vector<Macro> sel_m;
    std::vector<Cell> sel_s;
    int streams = 0;

    auto add_macro = [&](int g) {
        Macro link{g, 0, 0, 0, 0};
        for (auto& o : sel_m) {
            link.recv_m = std::max(link.recv_m, gains.i_mc(g, o.g));
            link.cause_m = std::max(link.cause_m, gains.i_mc(o.g, g));
            o.recv_m = std::max(o.recv_m, gains.i_mc(o.g, g));
            o.cause_m = std::max(o.cause_m, gains.i_mc(g, o.g));
        }
        for (auto& c : sel_s) {
            link.recv_s = std::max(link.recv_s, gains.j_sc(g, c.f));
            link.cause_s = std::max(link.cause_s, gains.j_mc(c.f, g));
            c.recv_m = std::max(c.recv_m, gains.j_mc(c.f, g));
            c.cause_m = std::max(c.cause_m, gains.j_sc(g, c.f));
        }
        sel_m.push_back(link);
        streams += gains.streams(g);
        mres.erase(std::find(mres.begin(), mres.end(), g));
    };
    auto add_cell = [&](int f) {
        Cell link{f, 0, 0, 0, 0};
        for (auto& o : sel_m) {
            link.recv_m = std::max(link.recv_m, gains.j_mc(f, o.g));
            link.cause_m = std::max(link.cause_m, gains.j_sc(o.g, f));
            o.recv_s = std::max(o.recv_s, gains.j_sc(o.g, f));
            o.cause_s = std::max(o.cause_s, gains.j_mc(f, o.g));
        }
        for (auto& c : sel_s) {
            link.recv_s = std::max(link.recv_s, gains.i_sc(f, c.f));
            link.cause_s = std::max(link.cause_s, gains.i_sc(c.f, f));
            c.recv_s = std::max(c.recv_s, gains.i_sc(c.f, f));
            c.cause_s = std::max(c.cause_s, gains.i_sc(f, c.f));
        }
        sel_s.push_back(link);
        sres.erase(std::find(sres.begin(), sres.end(), f));
    };

    // kappa of a macro link at per-stream macro power p: signal D p, caused
    // max(p cause_m, p cause_s), received max(p recv_m, q recv_s).
    auto macro_kappa = [&](double d, double rm, double rs, double cm, double cs, double p) {
        return detail::tin_kappa(d * p, p * std::max(cm, cs), std::max(p * rm, q * rs));
    };
    auto cell_kappa = [&](double d, double rm, double rs, double cm, double cs, double p) {
        return detail::tin_kappa(d * q, q * std::max(cm, cs), std::max(p * rm, q * rs));
    };

    // Product of kappas after adding macro group g (0 when infeasible).
    auto macro_score = [&](int g) {
        const double p = powers.macro / (streams + gains.streams(g));
        double rm = 0, rs = 0, cm = 0, cs = 0;
        double product = 1.0;
        for (const auto& o : sel_m) {
            rm = std::max(rm, gains.i_mc(g, o.g));
            cm = std::max(cm, gains.i_mc(o.g, g));
            const double k = macro_kappa(gains.d_mc(o.g), std::max(o.recv_m, gains.i_mc(o.g, g)), o.recv_s,
                                         std::max(o.cause_m, gains.i_mc(g, o.g)), o.cause_s, p);
            if (!(k > 1.0)) return 0.0;
            product *= k;
        }
        for (const auto& c : sel_s) {
            rs = std::max(rs, gains.j_sc(g, c.f));
            cs = std::max(cs, gains.j_mc(c.f, g));
            const double k = cell_kappa(gains.d_sc(c.f), std::max(c.recv_m, gains.j_mc(c.f, g)), c.recv_s,
                                        std::max(c.cause_m, gains.j_sc(g, c.f)), c.cause_s, p);
            if (!(k > 1.0)) return 0.0;
            product *= k;
        }
        const double self = macro_kappa(gains.d_mc(g), rm, rs, cm, cs, p);
        if (!(self > 1.0)) return 0.0;
        return product * self;
    };
    auto cell_score = [&](int f) {
        const double p = streams > 0 ? powers.macro / streams : 0.0;
        double rm = 0, rs = 0, cm = 0, cs = 0;
        double product = 1.0;
        for (const auto& o : sel_m) {
            rm = std::max(rm, gains.j_mc(f, o.g));
            cm = std::max(cm, gains.j_sc(o.g, f));
            const double k = macro_kappa(gains.d_mc(o.g), o.recv_m, std::max(o.recv_s, gains.j_sc(o.g, f)),
                                         o.cause_m, std::max(o.cause_s, gains.j_mc(f, o.g)), p);
            if (!(k > 1.0)) return 0.0;
            product *= k;
        }
        for (const auto& c : sel_s) {
            rs = std::max(rs, gains.i_sc(f, c.f));
            cs = std::max(cs, gains.i_sc(c.f, f));
            const double k = cell_kappa(gains.d_sc(c.f), c.recv_m, std::max(c.recv_s, gains.i_sc(c.f, f)),
                                        c.cause_m, std::max(c.cause_s, gains.i_sc(f, c.f)), p);
            if (!(k > 1.0)) return 0.0;
            product *= k;
        }
        const double self = cell_kappa(gains.d_sc(f), rm, rs, cm, cs, p);
        if (!(self > 1.0)) return 0.0;
        return product * self;
    };

    // Seed: highest-priority candidate with the strongest direct link.
    long cmax = std::numeric_limits<long>::min();
    for (int g : mres) cmax = std::max(cmax, prio(g));
    for (int f : sres) cmax = std::max(cmax, prio(f));
    int gbest = -1, fbest = -1;
    double gval = -1.0, fval = -1.0;
    for (int g : mres)
        if (prio(g) == cmax && gains.d_mc(g) * powers.macro / gains.streams(g) > gval) {
            gbest = g;
            gval = gains.d_mc(g) * powers.macro / gains.streams(g);
        }
    for (int f : sres)
        if (prio(f) == cmax && gains.d_sc(f) * q > fval) {
            fbest = f;
            fval = gains.d_sc(f) * q;
        }
    if (gbest >= 0 && gval > fval)
        add_macro(gbest);
    else
        add_cell(fbest);

    bool macro_open = true;
    while (true) {
        if (static_cast<int>(sel_m.size()) >= max_groups) macro_open = false;
        std::vector<std::pair<int, double>> gtin, stin;
        if (macro_open) {
            for (int g : mres)
                if (const double s = macro_score(g); s > 0.0) gtin.emplace_back(g, s);
            if (gtin.empty()) macro_open = false;
        }
        for (int f : sres)
            if (const double s = cell_score(f); s > 0.0) stin.emplace_back(f, s);
        if (gtin.empty() && stin.empty()) break;

        long top = std::numeric_limits<long>::min();
        for (const auto& [g, s] : gtin) top = std::max(top, prio(g));
        for (const auto& [f, s] : stin) top = std::max(top, prio(f));
        int gstar = -1, fstar = -1;
        double gs = -1.0, fs = -1.0;
        for (const auto& [g, s] : gtin)
            if (prio(g) == top && s > gs) gstar = g, gs = s;
        for (const auto& [f, s] : stin)
            if (prio(f) == top && s > fs) fstar = f, fs = s;
        if (gstar >= 0 && (fstar < 0 || gs > fs))
            add_macro(gstar);
        else
            add_cell(fstar);
    }

    TinSelection out;
    for (const auto& o : sel_m) out.macro_groups.push_back(o.g);
    for (const auto& c : sel_s) out.cells.push_back(c.f);
    return out;
}

} // namespace hetnet

#endif // HETNET_COORDINATION_HPP
