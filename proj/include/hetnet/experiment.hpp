#ifndef HETNET_EXPERIMENT_HPP
#define HETNET_EXPERIMENT_HPP

#include "hetnet/mcoracle.hpp"
#include "hetnet/simharness.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hetnet {

inline constexpr const char* kLibraryVersion = "1.0.0";
inline constexpr int kManifestSchemaVersion = 1;

/// Parameters plus sweep axes. Every axis key of the config file accepts a
/// single value, a comma list, or (for integers) an inclusive range A:B.
struct ExperimentConfig {
    SimParams params;
    std::vector<int> max_groups{5};
    std::vector<double> gammas{1.0};
    std::vector<int> num_small_cells{50};
    std::vector<DeploymentMode> deployments{DeploymentMode::Uniform};
    std::vector<Policy> policies{Policy::None};
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    bool write_rate_cdf = true;
    int workers = 0;  // 0: hardware concurrency

    /// Throws InvalidArgument naming the offending field.
    void validate() const;
};

/// Parses flat `key = value` text ('#' starts a comment). Unknown keys and
/// malformed values raise InvalidArgument with the key and line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical `key = value` rendering of a config; the config hash is FNV-1a of it.
std::string resolved_config(const ExperimentConfig& config);
std::uint64_t config_hash(const ExperimentConfig& config);

int parse_int_field(const std::string& key, const std::string& value);
double parse_double_field(const std::string& key, const std::string& value);
std::vector<int> parse_int_list(const std::string& key, const std::string& value);
std::vector<double> parse_double_list(const std::string& key, const std::string& value);

struct ExperimentReport {
    int sweep_points = 0;
    int failed_points = 0;
    std::vector<std::string> failures;
};

/// Runs every sweep point over num_drops drops and writes tradeoff.csv,
/// offload.csv, ratecdf.csv (optional) and manifest.json into out_dir.
/// Drops share hotspot positions and macro statistics across sweep points.
ExperimentReport run_experiment(const ExperimentConfig& config, std::ostream& log);

struct DeValidationOptions {
    SimParams params;
    std::vector<int> antennas{32, 64, 128, 256};
    int layouts = 10;
    int draws = 200;
    std::uint64_t seed = 1;
    ZfNormalization macro_zf = ZfNormalization::PerGroup;
};

struct DeValidationPoint {
    int antennas = 0;
    double macro_error = 0.0;  // median relative error over groups and layouts
    double cell_error = 0.0;
    double pooled_error = 0.0;
    int macro_groups = 0;
    int cells = 0;
};

/// Deterministic-equivalent SINRs against empirical medians of explicit ZF
/// transmissions on the same layouts, one point per macro array size.
std::vector<DeValidationPoint> validate_de(const DeValidationOptions& options, std::ostream* log = nullptr);

} // namespace hetnet

#endif // HETNET_EXPERIMENT_HPP
