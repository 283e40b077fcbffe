#ifndef HETNET_GEOMETRY_HPP
#define HETNET_GEOMETRY_HPP

#include "hetnet/common.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace hetnet {

/// Simulation parameters. Defaults reproduce the reference scenario
/// (500 hotspots on a 1 km cell, 3.5 path-loss exponent, 5 dB walls).
struct SimParams {
    int num_groups = 500;             // N_u
    int num_small_cells = 50;         // N_f
    double cell_radius = 1000.0;      // R_mc [m]
    double exclusion_radius = 100.0;  // R_excl [m]
    double cutoff_distance = 50.0;    // d_0 [m]
    double pathloss_exponent = 3.5;   // alpha
    double wall_loss_db = 5.0;        // w [dB]
    double loading = 0.8;             // beta
    int macro_antennas = 100;         // M
    int small_cell_antennas = 10;     // L
    double scattering_radius = 30.0;  // R_u [m]
    double cell_edge_snr_db = 10.0;
    double small_cell_power_offset_db = -20.0;  // P1 / P0 [dB]
    int max_groups = 5;               // G
    double eps1 = 0.1;
    double eps2 = 0.1;
    double gamma = 1.0;
    int slots_per_drop = 200;
    int num_drops = 100;
    double rank_threshold = 1e-3;

    /// Throws InvalidArgument naming the first offending field.
    void validate() const;
};

enum class DeploymentMode { Uniform, Interior, Edge };

std::string_view to_string(DeploymentMode mode);
DeploymentMode parse_deployment(std::string_view text);

struct Layout {
    std::vector<Eigen::Vector2d> positions;
    std::vector<double> theta;       // angle of arrival at the macro array [rad], in [-pi, pi)
    std::vector<double> dist_macro;  // distance to the macro [m]
    std::vector<double> delta;       // angular spread [rad]
    std::vector<int> smallcell_set;  // sorted group ids hosting a small cell
    std::vector<int> macro_set;      // sorted complement

    int size() const { return static_cast<int>(positions.size()); }
    bool has_small_cell(int g) const { return membership_.at(g) != 0; }

    /// Replaces the small-cell set and recomputes the complement.
    void set_small_cells(std::vector<int> cells);

private:
    std::vector<char> membership_;
};

/// Hotspot positions i.i.d. uniform in area on the annulus [R_excl, R_mc].
/// The small-cell set is left empty.
Layout sample_layout(const SimParams& params, Rng& rng);

/// Layout from explicit positions (used for hand-built scenarios).
Layout make_layout(const std::vector<Eigen::Vector2d>& positions, const std::vector<int>& small_cells,
                   const SimParams& params);

/// Chooses num_small_cells distinct groups according to the deployment law.
/// Interior and edge modes bias selection so that the selected distances follow
/// F(r) proportional to r and r^3 respectively, renormalised to the annulus.
Layout assign_small_cells(Layout layout, DeploymentMode mode, int num_small_cells, const SimParams& params,
                          Rng& rng);

/// One-ring angular spread arctan(R_u / d).
double angular_spread(double dist_macro, double scattering_radius);

/// Target distance CDF of the selected groups on [r_min, r_max].
double deployment_cdf(DeploymentMode mode, double r, double r_min, double r_max);

} // namespace hetnet

#endif // HETNET_GEOMETRY_HPP
