#include "hetnet/experiment.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hetnet;

namespace {

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("hetnet_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

const char* kTiny = R"(
N_u = 24        # tiny layout
M = 16
L = 6
slots_per_drop = 6
n_drops = 3
N_f = 6
)";

} // namespace

TEST_SUITE("experiment")
{
    TEST_CASE("empty config gives the reference defaults")
    {
        const auto c = parse_config("");
        const SimParams& p = c.params;
        CHECK(p.num_groups == 500);
        CHECK(p.cell_radius == 1000.0);
        CHECK(p.cutoff_distance == 50.0);
        CHECK(p.pathloss_exponent == 3.5);
        CHECK(p.wall_loss_db == 5.0);
        CHECK(p.loading == 0.8);
        CHECK(p.eps1 == 0.1);
        CHECK(p.eps2 == 0.1);
        CHECK(c.gammas == std::vector<double>{1.0});
        CHECK(c.num_small_cells == std::vector<int>{50});
    }

    TEST_CASE("config errors name the key and line")
    {
        CHECK_THROWS_WITH_AS(parse_config("beta = 1.5"), doctest::Contains("beta"), InvalidArgument);
        CHECK_THROWS_WITH_AS(parse_config("\n\nfoo = 1"), doctest::Contains("line 3"), InvalidArgument);
        CHECK_THROWS_WITH_AS(parse_config("M = ten"), doctest::Contains("M"), InvalidArgument);
        CHECK_THROWS_AS(parse_config("G"), InvalidArgument);
        CHECK_THROWS_AS(parse_config("G = 5:2"), InvalidArgument);
        CHECK_THROWS_AS(parse_config("policy = none,teleport"), InvalidArgument);
        CHECK_THROWS_AS(load_config("/nonexistent/config.txt"), InvalidArgument);
    }

    TEST_CASE("lists, ranges and the resolved rendering")
    {
        const auto c = parse_config("G = 1:3, 7\ngamma = 0.1, inf\ndeployment = edge, interior\nseed = 42");
        CHECK(c.max_groups == std::vector<int>{1, 2, 3, 7});
        CHECK(std::isinf(c.gammas[1]));
        CHECK(c.deployments == std::vector<DeploymentMode>{DeploymentMode::Edge, DeploymentMode::Interior});
        const auto again = parse_config(resolved_config(c));
        CHECK(resolved_config(again) == resolved_config(c));
        CHECK(config_hash(again) == config_hash(c));
        CHECK(config_hash(parse_config("seed = 43")) != config_hash(parse_config("seed = 42")));
    }

    TEST_CASE("full sweep writes one row per point, each carrying seed and hash")
    {
        auto c = parse_config(std::string(kTiny) + "G = 1:10\ndeployment = uniform, interior, edge\n"
                                                   "policy = none, onoff, offload, tin\nseed = 777\nn_drops = 1");
        c.out_dir = scratch("sweep").string();
        std::ostringstream log;
        const auto report = run_experiment(c, log);
        CHECK(report.sweep_points == 120);
        CHECK(report.failed_points == 0);
        std::istringstream csv(slurp(std::filesystem::path(c.out_dir) / "tradeoff.csv"));
        std::string line;
        std::getline(csv, line);
        CHECK(line.rfind("seed,config_hash,policy", 0) == 0);
        int rows = 0;
        char hash[17];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(c)));
        while (std::getline(csv, line)) {
            ++rows;
            CHECK(line.rfind("777," + std::string(hash) + ",", 0) == 0);
            CHECK(line.find(",ok") != std::string::npos);
        }
        CHECK(rows == 120);
        CHECK(std::filesystem::exists(std::filesystem::path(c.out_dir) / "manifest.json"));
        CHECK(std::filesystem::exists(std::filesystem::path(c.out_dir) / "offload.csv"));
    }

    TEST_CASE("reruns are byte-identical regardless of worker count")
    {
        auto c = parse_config(std::string(kTiny) + "policy = none, tin\ngamma = 0.5, 2\nseed = 5");
        std::ostringstream log;
        c.out_dir = scratch("det_a").string();
        c.workers = 1;
        run_experiment(c, log);
        const auto a = std::filesystem::path(c.out_dir);
        c.out_dir = scratch("det_b").string();
        c.workers = 3;
        run_experiment(c, log);
        const auto b = std::filesystem::path(c.out_dir);
        for (const char* file : {"tradeoff.csv", "offload.csv", "ratecdf.csv"}) {
            INFO(file);
            CHECK(slurp(a / file) == slurp(b / file));
            CHECK_FALSE(slurp(a / file).empty());
        }
    }
}
