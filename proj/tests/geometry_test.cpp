#include "hetnet/geometry.hpp"
#include "hetnet/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace hetnet;

TEST_SUITE("geometry")
{
    TEST_CASE("default parameters validate and bad ones name the field")
    {
        SimParams p;
        CHECK_NOTHROW(p.validate());
        p.loading = 1.5;
        CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("beta"), InvalidArgument);
        p = SimParams{};
        p.num_small_cells = p.num_groups + 1;
        CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("N_f"), InvalidArgument);
        p = SimParams{};
        p.exclusion_radius = p.cell_radius;
        CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("R_excl"), InvalidArgument);
    }

    TEST_CASE("sampled groups stay on the annulus with derived angles")
    {
        SimParams p;
        Rng rng(11);
        const Layout layout = sample_layout(p, rng);
        REQUIRE(layout.size() == 500);
        CHECK(layout.smallcell_set.empty());
        CHECK(layout.macro_set.size() == 500u);
        for (int g = 0; g < layout.size(); ++g) {
            CHECK(layout.dist_macro[g] >= 100.0);
            CHECK(layout.dist_macro[g] <= 1000.0);
            CHECK(layout.theta[g] >= -kPi);
            CHECK(layout.theta[g] < kPi);
            CHECK(layout.delta[g] == doctest::Approx(std::atan(30.0 / layout.dist_macro[g])));
            CHECK(layout.delta[g] > 0.0);
            CHECK(layout.delta[g] < kPi / 2);
        }
    }

    TEST_CASE("thin annulus puts every group near the cell edge")
    {
        SimParams p;
        p.exclusion_radius = 999.0;
        Rng rng(3);
        const Layout layout = sample_layout(p, rng);
        double sum = 0.0;
        for (double d : layout.dist_macro) sum += d;
        CHECK(sum / layout.size() == doctest::Approx(999.5).epsilon(1e-3));
    }

    TEST_CASE("squared distances follow the area law (KS over 1e5 samples)")
    {
        SimParams p;
        p.num_groups = 100000;
        p.num_small_cells = 0;
        Rng rng(5);
        const Layout layout = sample_layout(p, rng);
        const double ks = ks_distance(layout.dist_macro, [&](double r) {
            return deployment_cdf(DeploymentMode::Uniform, r, p.exclusion_radius, p.cell_radius);
        });
        CHECK(ks <= 0.01);
    }

    TEST_CASE("angular spread")
    {
        CHECK(angular_spread(30.0 / std::tan(0.1), 30.0) == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(angular_spread(300.0, 30.0) == doctest::Approx(0.0996686524911620).epsilon(1e-12));
        CHECK_THROWS_AS(angular_spread(30.0, 30.0), InvalidArgument);
        double last = kPi;
        for (double d = 31.0; d < 2000.0; d *= 1.3) {
            const double a = angular_spread(d, 30.0);
            CHECK(a < last);
            last = a;
        }
    }

    TEST_CASE("small-cell sets are exact-size sets")
    {
        SimParams p;
        for (DeploymentMode mode : {DeploymentMode::Uniform, DeploymentMode::Interior, DeploymentMode::Edge}) {
            for (std::uint64_t seed = 0; seed < 20; ++seed) {
                Rng rng(seed);
                const Layout layout = assign_small_cells(sample_layout(p, rng), mode, 50, p, rng);
                const std::set<int> unique(layout.smallcell_set.begin(), layout.smallcell_set.end());
                CHECK(unique.size() == 50u);
                CHECK(std::is_sorted(layout.smallcell_set.begin(), layout.smallcell_set.end()));
                CHECK(layout.macro_set.size() == 450u);
                for (int f : layout.smallcell_set) CHECK(layout.has_small_cell(f));
                for (int g : layout.macro_set) CHECK_FALSE(layout.has_small_cell(g));
            }
        }
    }

    TEST_CASE("N_f = N_u selects every group; N_f > N_u is rejected")
    {
        SimParams p;
        p.num_groups = 40;
        p.num_small_cells = 40;
        Rng rng(1);
        for (DeploymentMode mode : {DeploymentMode::Uniform, DeploymentMode::Interior, DeploymentMode::Edge}) {
            const Layout layout = assign_small_cells(sample_layout(p, rng), mode, 40, p, rng);
            CHECK(layout.smallcell_set.size() == 40u);
            CHECK(layout.macro_set.empty());
        }
        Layout layout = sample_layout(p, rng);
        CHECK_THROWS_AS(assign_small_cells(layout, DeploymentMode::Uniform, 41, p, rng), InvalidArgument);
    }

    TEST_CASE("uniform mode with one small cell picks each group equally often")
    {
        SimParams p;
        p.num_groups = 10;
        p.num_small_cells = 1;
        Rng rng(9);
        const Layout base = sample_layout(p, rng);
        std::vector<int> hits(10, 0);
        const int trials = 50000;
        for (int t = 0; t < trials; ++t) ++hits[assign_small_cells(base, DeploymentMode::Uniform, 1, p, rng).smallcell_set[0]];
        // binomial sd = sqrt(n p (1-p)) ~ 67; allow 5 sd
        for (int h : hits) CHECK(std::abs(h - trials / 10) < 335);
    }

    TEST_CASE("deployment laws on the annulus (KS, 1e3 layouts per mode)")
    {
        SimParams p;
        for (DeploymentMode mode : {DeploymentMode::Uniform, DeploymentMode::Interior, DeploymentMode::Edge}) {
            std::vector<double> r;
            for (std::uint64_t seed = 0; seed < 1000; ++seed) {
                Rng rng(derive_seed(77, seed));
                const Layout layout = assign_small_cells(sample_layout(p, rng), mode, 50, p, rng);
                for (int f : layout.smallcell_set) r.push_back(layout.dist_macro[f]);
            }
            const double ks = ks_distance(r, [&](double x) {
                return deployment_cdf(mode, x, p.exclusion_radius, p.cell_radius);
            });
            INFO(to_string(mode), " KS ", ks);
            CHECK(ks <= 0.05);
        }
    }

    TEST_CASE("deployment CDFs are normalised on the annulus")
    {
        for (DeploymentMode mode : {DeploymentMode::Uniform, DeploymentMode::Interior, DeploymentMode::Edge}) {
            CHECK(deployment_cdf(mode, 100.0, 100.0, 1000.0) == 0.0);
            CHECK(deployment_cdf(mode, 1000.0, 100.0, 1000.0) == 1.0);
        }
        // interior puts more mass near the macro than uniform, edge less
        CHECK(deployment_cdf(DeploymentMode::Interior, 500.0, 100.0, 1000.0) >
              deployment_cdf(DeploymentMode::Uniform, 500.0, 100.0, 1000.0));
        CHECK(deployment_cdf(DeploymentMode::Edge, 500.0, 100.0, 1000.0) <
              deployment_cdf(DeploymentMode::Uniform, 500.0, 100.0, 1000.0));
    }

    TEST_CASE("deployment names round-trip")
    {
        for (DeploymentMode mode : {DeploymentMode::Uniform, DeploymentMode::Interior, DeploymentMode::Edge})
            CHECK(parse_deployment(to_string(mode)) == mode);
        CHECK_THROWS_AS(parse_deployment("sideways"), InvalidArgument);
    }
}
