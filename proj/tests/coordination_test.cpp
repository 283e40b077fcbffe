#include "hetnet/coordination.hpp"
#include "hetnet/simharness.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>

using namespace hetnet;

namespace {

// Stand-alone gain table for small hand-made interference networks. Ids
// 0..nm-1 are macro candidates, nm..nm+nc-1 small cells.
struct ToyGains {
    std::vector<int> stream_count;
    Eigen::VectorXd direct;
    Eigen::MatrixXd gain;  // gain(victim, source)
    int cell_streams = 2;

    int streams(int g) const { return stream_count[g]; }
    int sc_streams() const { return cell_streams; }
    double d_mc(int g) const { return direct(g); }
    double d_sc(int f) const { return direct(f); }
    double i_mc(int v, int s) const { return gain(v, s); }
    double j_mc(int f, int g) const { return gain(f, g); }
    double j_sc(int g, int f) const { return gain(g, f); }
    double i_sc(int f, int fp) const { return gain(f, fp); }
};

ToyGains random_toy(int links, Rng& rng, double cross_scale)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ToyGains t;
    t.direct.resize(links);
    t.gain = Eigen::MatrixXd::Zero(links, links);
    for (int i = 0; i < links; ++i) {
        t.stream_count.push_back(1 + static_cast<int>(3 * u(rng)));
        t.direct(i) = 0.5 + 1.5 * u(rng);
        for (int j = 0; j < links; ++j)
            if (i != j) t.gain(i, j) = cross_scale * std::pow(u(rng), 3);
    }
    return t;
}

struct Subset {
    std::vector<int> macro, cells;
};

Subset split(unsigned mask, int nm, int n)
{
    Subset s;
    for (int i = 0; i < n; ++i)
        if (mask >> i & 1u) (i < nm ? s.macro : s.cells).push_back(i);
    return s;
}

bool feasible(const Subset& s, const ToyGains& t, const TransmitPowers& pw)
{
    return tin_condition_holds(tin_links<ToyGains>(s.macro, s.cells, t, pw));
}

unsigned to_mask(const TinSelection& sel)
{
    unsigned m = 0;
    for (int g : sel.macro_groups) m |= 1u << g;
    for (int f : sel.cells) m |= 1u << f;
    return m;
}

} // namespace

TEST_SUITE("coordination")
{
    TEST_CASE("no coordination keeps every small cell on")
    {
        SimParams p = testing::small_params(30, 0);
        CHECK(policy_none(testing::random_scenario(p, 1).layout()).empty());
        p.num_small_cells = 12;
        const auto sc = testing::random_scenario(p, 1);
        CHECK(policy_none(sc.layout()) == sc.layout().smallcell_set);
    }

    TEST_CASE("ON/OFF edge cases")
    {
        const auto sc = testing::random_scenario(testing::small_params(40, 10), 2);
        const auto& cells = sc.layout().smallcell_set;
        const std::vector<int> macro{sc.layout().macro_set[0], sc.layout().macro_set[5]};
        const double inf = std::numeric_limits<double>::infinity();
        CHECK(policy_onoff(macro, cells, sc.table(), inf, inf, sc.powers()) == cells);
        CHECK(policy_onoff(macro, cells, sc.table(), 0.0, 0.0, sc.powers()).empty());
        const std::vector<int> idle{};
        CHECK(policy_onoff(idle, cells, sc.table(), 0.0, 0.0, sc.powers()) == cells);
        CHECK_THROWS_AS(policy_onoff(macro, cells, sc.table(), -1.0, 0.1, sc.powers()), InvalidArgument);
    }

    TEST_CASE("ON/OFF in the two-group toy: aligned cell switches off, rotated one stays on")
    {
        const SimParams p;
        const std::vector<int> macro{0}, cells{1};
        const auto aligned = testing::toy_scenario(p, 300.0, 0.0);
        const auto rotated = testing::toy_scenario(p, 300.0, kPi / 4);
        CHECK(policy_onoff(macro, cells, aligned.table(), 0.1, 0.1, aligned.powers()).empty());
        CHECK(policy_onoff(macro, cells, rotated.table(), 0.1, 0.1, rotated.powers()) == cells);
    }

    TEST_CASE("offload extremes")
    {
        const auto sc = testing::random_scenario(testing::small_params(40, 10), 3);
        const auto never = policy_offload(sc.layout(), sc.table(), std::numeric_limits<double>::infinity(), sc.powers());
        CHECK(std::all_of(never.begin(), never.end(), [](int t) { return t == -1; }));
        const auto always = policy_offload(sc.layout(), sc.table(), 0.0, sc.powers());
        for (int g : sc.layout().macro_set) {
            CHECK(always[g] >= 0);
            CHECK(sc.layout().has_small_cell(always[g]));
        }
        for (int f : sc.layout().smallcell_set) CHECK(always[f] == -1);
    }

    TEST_CASE("policies are monotone in their thresholds")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto sc = testing::random_scenario(testing::small_params(40, 10), 50 + seed);
            const auto& cells = sc.layout().smallcell_set;
            const std::vector<int> macro(sc.layout().macro_set.begin(), sc.layout().macro_set.begin() + 3);
            auto small = policy_onoff(macro, cells, sc.table(), 0.05, 0.05, sc.powers());
            auto large = policy_onoff(macro, cells, sc.table(), 0.5, 0.2, sc.powers());
            CHECK(std::includes(large.begin(), large.end(), small.begin(), small.end()));
            const auto lo = policy_offload(sc.layout(), sc.table(), 0.5, sc.powers());
            const auto hi = policy_offload(sc.layout(), sc.table(), 2.0, sc.powers());
            for (int g = 0; g < sc.layout().size(); ++g)
                if (hi[g] >= 0) CHECK(lo[g] == hi[g]);
        }
    }

    TEST_CASE("TIN condition examples")
    {
        TinLinkView one{Eigen::VectorXd::Constant(1, 0.1), Eigen::MatrixXd::Zero(1, 1)};
        CHECK(tin_condition_holds(one));
        for (double x : {0.0, 0.5, 1.0, 1.0001, 3.0}) {
            TinLinkView two{Eigen::VectorXd::Ones(2), Eigen::MatrixXd::Constant(2, 2, x)};
            two.cross.diagonal().setZero();
            CHECK(tin_condition_holds(two) == (x <= 1.0));
        }
        TinLinkView dead{Eigen::Vector2d(0.0, 1.0), Eigen::MatrixXd::Zero(2, 2)};
        dead.cross(0, 1) = dead.cross(1, 0) = 0.2;
        CHECK_FALSE(tin_condition_holds(dead));
    }

    TEST_CASE("TIN selection trivial cases")
    {
        TransmitPowers pw{1.0, 1.0};
        ToyGains t;
        t.stream_count = {2, 2, 2, 2};
        t.direct = Eigen::VectorXd::Ones(4);
        t.gain = Eigen::MatrixXd::Zero(4, 4);
        const std::vector<long> prio(4, 1);
        const std::vector<int> one{2}, none{}, macro{0, 1, 2}, cells{3};
        const auto lone = tin_select<ToyGains>(prio, one, none, 5, t, pw);
        CHECK(lone.macro_groups == std::vector<int>{2});
        CHECK(lone.cells.empty());
        const auto all = tin_select<ToyGains>(prio, macro, cells, 3, t, pw);
        CHECK(all.macro_groups.size() == 3u);
        CHECK(all.cells.size() == 1u);
        CHECK_THROWS_AS(tin_select<ToyGains>(prio, none, none, 3, t, pw), InvalidArgument);
    }

    TEST_CASE("TIN greedy against exhaustive enumeration of six links")
    {
        Rng rng(12);
        const TransmitPowers pw{4.0, 1.0};
        double ratio = 0.0;
        const int instances = 50;
        for (int inst = 0; inst < instances; ++inst) {
            const ToyGains t = random_toy(6, rng, 1.5);
            std::vector<long> prio(6);
            for (auto& c : prio) c = std::uniform_int_distribution<long>(1, 2)(rng);
            const std::vector<int> macro{0, 1, 2}, cells{3, 4, 5};
            const auto sel = tin_select<ToyGains>(prio, macro, cells, 3, t, pw);
            const unsigned chosen = to_mask(sel);
            CHECK(feasible(split(chosen, 3, 6), t, pw));
            int best = 0;
            for (unsigned mask = 1; mask < 64u; ++mask)
                if (feasible(split(mask, 3, 6), t, pw)) best = std::max(best, std::popcount(mask));
            for (int i = 0; i < 6; ++i)
                if (!(chosen >> i & 1u)) CHECK_FALSE(feasible(split(chosen | 1u << i, 3, 6), t, pw));
            ratio += double(std::popcount(chosen)) / best;
        }
        INFO("mean greedy / maximum size ", ratio / instances);
        CHECK(ratio / instances >= 0.8);
    }

    TEST_CASE("TIN selection on a real drop is feasible and maximal")
    {
        const auto sc = testing::random_scenario(testing::small_params(60, 12), 8);
        const auto& t = sc.table();
        std::vector<long> prio(60, 1);
        const auto sel = tin_select(prio, sc.layout().macro_set, sc.layout().smallcell_set, 5, t, sc.powers());
        CHECK(tin_condition_holds(tin_links(sel.macro_groups, sel.cells, t, sc.powers())));
        CHECK(tin_selection_is_maximal(sel, sc.layout().macro_set, sc.layout().smallcell_set, 5, t, sc.powers()));
        CHECK(sel.macro_groups.size() <= 5u);
    }
}
