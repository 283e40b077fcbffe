#include "hetnet/mcoracle.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace hetnet;

namespace {

Eigen::MatrixXcd random_block(int rows, int cols, std::uint64_t seed)
{
    Rng rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXcd h(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) h(i, j) = cplx(n(rng), n(rng));
    return h;
}

testing::Scenario two_tier()
{
    SimParams p = testing::small_params(5, 2);
    return testing::explicit_scenario(p,
                                      {testing::polar(300, 0.2), testing::polar(600, -0.8), testing::polar(450, 1.0),
                                       testing::polar(350, 0.4), testing::polar(800, -1.5)},
                                      {3, 4});
}

} // namespace

TEST_SUITE("mcoracle")
{
    TEST_CASE("ZF stages null intra-group interference")
    {
        const Eigen::MatrixXcd h = random_block(12, 5, 1);
        for (auto mode : {ZfNormalization::PerColumn, ZfNormalization::PerGroup}) {
            const Eigen::MatrixXcd p = zf(h, mode);
            const Eigen::MatrixXcd g = h.adjoint() * p;
            for (int k = 0; k < 5; ++k)
                for (int m = 0; m < 5; ++m)
                    if (k != m) CHECK(std::abs(g(k, m)) < 1e-9 * std::abs(g(k, k)));
        }
        const Eigen::MatrixXcd cols = zf_columns(h);
        for (int k = 0; k < 5; ++k) CHECK(std::abs(cols.col(k).norm() - 1.0) < 1e-12);
        CHECK(zf_group(h).squaredNorm() == doctest::Approx(5.0).epsilon(1e-12));
    }

    TEST_CASE("group scaling puts every user at the same gain")
    {
        const Eigen::MatrixXcd h = random_block(10, 4, 2);
        const Eigen::VectorXd d = (h.adjoint() * zf_group(h)).diagonal().cwiseAbs2();
        CHECK(d.maxCoeff() == doctest::Approx(d.minCoeff()).epsilon(1e-9));
    }

    TEST_CASE("a single user gets the matched-filter direction")
    {
        const Eigen::MatrixXcd h = random_block(6, 1, 3);
        const Eigen::MatrixXcd p = zf_columns(h);
        CHECK((p - h / h.norm()).norm() < 1e-12);
    }

    TEST_CASE("rank-deficient blocks are rejected")
    {
        Eigen::MatrixXcd h = random_block(6, 3, 4);
        h.col(2) = h.col(0);
        CHECK_THROWS_AS(zf_columns(h), RankDeficientError);
    }

    TEST_CASE("normalization names round-trip")
    {
        for (auto mode : {ZfNormalization::PerColumn, ZfNormalization::PerGroup})
            CHECK(parse_zf_normalization(to_string(mode)) == mode);
        CHECK_THROWS_AS(parse_zf_normalization("frobenius"), InvalidArgument);
    }

    TEST_CASE("macro draws follow the group covariance")
    {
        SimParams p = testing::small_params(1, 0);
        p.macro_antennas = 16;
        const auto sc = testing::explicit_scenario(p, {testing::polar(200, 0.5)}, {});
        const std::vector<int> groups{0}, cells{};
        const ChannelSampler sampler(sc.table(), groups, cells);
        const Eigen::MatrixXcd r = sc.table().macro().models[0].covariance();
        Rng rng(5);
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(16, 16);
        double energy = 0.0;
        long users = 0;
        while (users < 100000) {
            const auto h = sampler.draw(rng).macro[0];
            acc += h * h.adjoint();
            energy += h.squaredNorm();
            users += h.cols();
        }
        acc /= double(users);
        CHECK((acc - r).norm() <= 0.03 * r.norm());
        CHECK(energy / users == doctest::Approx(r.trace().real()).epsilon(0.02));
    }

    TEST_CASE("small-cell ZF gain matches the array-gain identity")
    {
        const auto sc = two_tier();
        const auto& t = sc.table();
        const std::vector<int> groups{0}, cells{3, 4};
        const ChannelSampler sampler(t, groups, cells);
        Rng rng(6);
        std::vector<double> sum(2, 0.0);
        std::vector<long> count(2, 0);
        for (int d = 0; d < 4000; ++d) {
            const CellTierDraw draw = sampler.draw_cell_tier(rng);
            for (int j = 0; j < 2; ++j) {
                sum[j] += draw.signal[j].sum();
                count[j] += draw.signal[j].size();
                for (int k = 0; k < draw.precoders[j].cols(); ++k)
                    CHECK(std::abs(draw.precoders[j].col(k).norm() - 1.0) < 1e-12);
            }
        }
        for (int j = 0; j < 2; ++j) {
            const double target = t.d_sc(cells[j]);
            INFO("cell ", cells[j], " empirical ", sum[j] / count[j], " target ", target);
            CHECK(std::abs(sum[j] / count[j] - target) <= 0.05 * target);
        }
    }

    TEST_CASE("lone macro group sees pure SNR")
    {
        const auto sc = two_tier();
        const std::vector<int> groups{1}, cells{};
        Rng rng(7);
        const auto ch = draw_channels(sc.table(), groups, cells, rng);
        const auto pre = zf_precoders(ch, sc.table());
        const auto sinr = empirical_sinr(ch, pre, sc.table(), sc.powers());
        const Eigen::MatrixXcd beams = sc.table().macro().models[1].prebeamformer() * pre.macro[0];
        const int s = sc.table().streams(1);
        for (int k = 0; k < s; ++k) {
            const double snr = std::norm(ch.macro[0].col(k).dot(beams.col(k))) * sc.powers().macro / s;
            CHECK(sinr.macro[0](k) == doctest::Approx(snr).epsilon(1e-12));
        }
    }

    TEST_CASE("split-tier SINR equals the full realization")
    {
        const auto sc = two_tier();
        const std::vector<int> groups{0, 1}, cells{3, 4};
        Rng rng(8);
        const auto ch = draw_channels(sc.table(), groups, cells, rng);
        const auto pre = zf_precoders(ch, sc.table());
        const auto full = empirical_sinr(ch, pre, sc.table(), sc.powers());
        const auto split = empirical_sinr(ch, pre.macro, reduce_cell_tier(ch, pre.cells), sc.table(), sc.powers());
        for (std::size_t i = 0; i < full.macro.size(); ++i) CHECK(full.macro[i] == split.macro[i]);
        for (std::size_t j = 0; j < full.cells.size(); ++j) CHECK(full.cells[j] == split.cells[j]);
    }

    TEST_CASE("identical seeds reproduce identical samples")
    {
        const auto sc = two_tier();
        const std::vector<int> groups{0, 2}, cells{3};
        auto run = [&](std::uint64_t seed) {
            Rng rng(seed);
            const auto ch = draw_channels(sc.table(), groups, cells, rng);
            return empirical_sinr(ch, zf_precoders(ch, sc.table()), sc.table(), sc.powers());
        };
        const auto a = run(11), b = run(11), c = run(12);
        CHECK(a.macro[0] == b.macro[0]);
        CHECK(a.cells[0] == b.cells[0]);
        CHECK(a.macro[0] != c.macro[0]);
    }

    TEST_CASE("median")
    {
        CHECK(median({3.0, 1.0, 2.0}) == 2.0);
        CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    }
}
