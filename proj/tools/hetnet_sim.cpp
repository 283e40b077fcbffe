#include "hetnet/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace hetnet;

int main(int argc, char** argv)
{
    CLI::App app{"Monte-Carlo simulator of a massive-MIMO macrocell sharing spectrum with small cells"};
    std::string config_path, macro_zf = "group", policies, deployments, sweep_g, gammas, nfs;
    std::uint64_t seed = 0;
    std::string out_dir;
    int drops = 0, slots = 0, workers = -1;
    bool dry_run = false, validate = false, no_ratecdf = false;

    app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--policy", policies, "comma list of none, onoff, offload, tin");
    app.add_option("--deployment", deployments, "comma list of uniform, interior, edge");
    app.add_option("--sweep-g", sweep_g, "macro groups per slot, A:B or list");
    app.add_option("--gamma", gammas, "offload thresholds, comma list");
    app.add_option("--nf", nfs, "small-cell counts, comma list");
    app.add_option("--drops", drops, "drops per sweep point")->check(CLI::PositiveNumber);
    app.add_option("--slots", slots, "slots per drop")->check(CLI::PositiveNumber);
    app.add_option("--workers", workers, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    app.add_flag("--no-ratecdf", no_ratecdf, "skip the per-group rate dump");
    app.add_flag("--dry-run", dry_run, "print the resolved config and exit");
    app.add_flag("--validate-de", validate, "compare deterministic equivalents against explicit ZF draws");
    app.add_option("--macro-zf", macro_zf, "macro ZF scaling in --validate-de: group or column")
        ->check(CLI::IsMember({"group", "column"}));
    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig config = config_path.empty() ? parse_config("") : load_config(config_path);
        if (*seed_opt) config.seed = seed;
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (!policies.empty()) {
            config.policies.clear();
            for (const auto& item : CLI::detail::split(policies, ',')) config.policies.push_back(parse_policy(item));
        }
        if (!deployments.empty()) {
            config.deployments.clear();
            for (const auto& item : CLI::detail::split(deployments, ','))
                config.deployments.push_back(parse_deployment(item));
        }
        if (!sweep_g.empty()) config.max_groups = parse_int_list("--sweep-g", sweep_g);
        if (!gammas.empty()) config.gammas = parse_double_list("--gamma", gammas);
        if (!nfs.empty()) config.num_small_cells = parse_int_list("--nf", nfs);
        if (drops > 0) config.params.num_drops = drops;
        if (slots > 0) config.params.slots_per_drop = slots;
        if (workers >= 0) config.workers = workers;
        if (no_ratecdf) config.write_rate_cdf = false;
        config.params.max_groups = config.max_groups.front();
        config.params.gamma = config.gammas.front();
        config.params.num_small_cells = config.num_small_cells.front();
        config.validate();

        if (dry_run) {
            std::cout << resolved_config(config) << "out = " << config.out_dir << "\n";
            return 0;
        }
        if (validate) {
            DeValidationOptions options;
            options.params = config.params;
            options.params.small_cell_antennas = 16;
            options.params.max_groups = 4;
            options.seed = config.seed;
            options.macro_zf = parse_zf_normalization(macro_zf);
            validate_de(options, &std::cout);
            return 0;
        }
        const ExperimentReport report = run_experiment(config, std::cerr);
        for (const auto& f : report.failures) std::cerr << "failed: " << f << "\n";
        std::cout << "wrote " << report.sweep_points << " sweep points to " << config.out_dir << "\n";
        return report.failures.empty() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
