#ifndef HETNET_DETEQUIV_HPP
#define HETNET_DETEQUIV_HPP

#include "hetnet/channel.hpp"
#include "hetnet/common.hpp"
#include "hetnet/geometry.hpp"

#include <memory>
#include <span>
#include <vector>

namespace hetnet {

struct FixedPointOptions {
    double tol = 1e-10;
    int max_iter = 500;
};

/// Solution of the ZF deterministic-equivalent fixed point
///   m = tr(A T^{-1}) / b,   T = I + (S/b) A / m,   A = B^H R B.
struct FixedPointSolution {
    double m = 0.0;
    Eigen::MatrixXcd T;
    double F = 0.0;
    bool converged = false;
    int iterations = 0;
    int prebeam_dim = 0;
    int streams = 0;
    /// T^{-1} A T^{-1}; the interference kernel reuses it.
    Eigen::MatrixXcd weight;
    /// Eigenvalues of A.
    Eigen::VectorXd spectrum;

    /// One application of the fixed-point map to `x`.
    double update(double x) const;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last) : Error(what), last_iterate(last) {}
    double last_iterate;
};

/// Raised when the stream count leaves no positive solution (S >= rank of A).
class DegenerateLoadingError : public Error {
public:
    using Error::Error;
};

/// Fixed point on an already projected b x b Hermitian matrix A = B^H R B.
FixedPointSolution solve_fixed_point_projected(const Eigen::MatrixXcd& projected, int streams,
                                               FixedPointOptions options = {});

template <typename DerivedB, typename DerivedR>
FixedPointSolution solve_fixed_point(const Eigen::MatrixBase<DerivedB>& prebeamformer,
                                     const Eigen::MatrixBase<DerivedR>& covariance, int streams,
                                     FixedPointOptions options = {})
{
    const Eigen::MatrixXcd b = prebeamformer;
    const Eigen::Index dim = b.cols();
    if ((b.adjoint() * b - Eigen::MatrixXcd::Identity(dim, dim)).norm() > 1e-9 * std::sqrt(double(dim)))
        throw InvalidArgument("solve_fixed_point: pre-beamformer columns must be orthonormal");
    return solve_fixed_point_projected(b.adjoint() * covariance * b, streams, options);
}

struct InterferenceGain {
    double n = 0.0;     // normalised leakage
    double gain = 0.0;  // n / m: per-stream power gain seen by the victim
};

/// Per-stream interference gain at a victim with channel covariance
/// `victim_covariance` produced by the ZF beams of a source group
/// (pre-beamformer B and fixed point of the source):
///   n = tr(T^{-1} A T^{-1} B^H R_victim B) / (b (1 - F)),  gain = n / m.
/// The fixed point belongs to the transmitting group; the covariance to the victim.
template <typename DerivedB, typename DerivedR>
InterferenceGain interference_gain(const Eigen::MatrixBase<DerivedB>& source_prebeamformer,
                                   const FixedPointSolution& source, const Eigen::MatrixBase<DerivedR>& victim_covariance)
{
    if (!(source.F < 1.0)) throw InvalidArgument("interference_gain: F >= 1 (invalid loading)");
    if (!(source.m > 0.0)) throw InvalidArgument("interference_gain: fixed point must be positive");
    const Eigen::MatrixXcd b = source_prebeamformer;
    const Eigen::MatrixXcd projected = b.adjoint() * victim_covariance * b;
    const double trace = (source.weight * projected).trace().real();
    InterferenceGain out;
    out.n = trace / (source.prebeam_dim * (1.0 - source.F));
    out.gain = out.n / source.m;
    return out;
}

/// Per-lag kernel of a source: s_k = sum_n K[n, n+k] with K = B W B^H, doubled
/// for k > 0, so that tr(R_v K) = Re(sum_k rho_v(k) s_k) for a Hermitian
/// Toeplitz victim covariance with first column rho_v.
Eigen::VectorXcd lag_kernel(const Eigen::MatrixXcd& prebeamformer, const FixedPointSolution& source);

struct TransmitPowers {
    double macro = 0.0;       // P0 (noise power = 1)
    double small_cell = 0.0;  // P1
};

/// P0 puts the cell-edge SNR at the macro radius; P1 = P0 * offset.
TransmitPowers transmit_powers(const SimParams& params);

/// Everything on the macro side that depends only on hotspot positions:
/// channel models, fixed points, direct gains b m, and the per-stream macro
/// interference gain cross(victim, source) between every pair of groups.
struct MacroStatistics {
    std::vector<GroupChannelModel> models;
    std::vector<FixedPointSolution> fixed_points;
    Eigen::VectorXd direct;  // D_mc = b m
    Eigen::MatrixXd cross;   // cross(victim, source), zero on the diagonal
    std::vector<int> widened; // groups whose pre-beamformer was widened past the effective rank

    int streams(int g) const { return models[g].streams(); }
};

MacroStatistics build_macro_statistics(const Layout& layout, const SimParams& params);

/// Deterministic direct and cross link gains for one layout and small-cell set.
class LinkGainTable {
public:
    LinkGainTable(std::shared_ptr<const MacroStatistics> macro, const Layout& layout, const SimParams& params);

    int num_groups() const { return gains_.num_groups(); }
    int streams(int g) const { return macro_->streams(g); }
    int sc_streams() const { return sc_streams_; }
    int sc_antennas() const { return sc_antennas_; }

    /// D_mc[g] = b_g m_g
    double d_mc(int g) const { return macro_->direct(g); }
    /// D_sc[f] = a(f,f) (L - S + 1)
    double d_sc(int f) const { return d_sc(f, f); }
    /// ZF gain of group g served by the small cell of group f.
    double d_sc(int g, int f) const { return gains_(g, f) * (sc_antennas_ - sc_streams_ + 1); }
    /// I_mc[victim, source]: per-stream leakage of the macro beams of `source` at `victim`.
    double i_mc(int victim, int source) const { return macro_->cross(victim, source); }
    /// J_mc[f, g]: same quantity with a small-cell group as victim.
    double j_mc(int f, int g) const { return macro_->cross(f, g); }
    /// J_sc[g, f] = a(g, f)
    double j_sc(int g, int f) const { return gains_(g, f); }
    /// I_sc[f, f'] = a(f, f')
    double i_sc(int f, int fp) const { return gains_(f, fp); }

    const PathGainMatrix& path_gains() const { return gains_; }
    const MacroStatistics& macro() const { return *macro_; }
    const std::shared_ptr<const MacroStatistics>& macro_ptr() const { return macro_; }

private:
    std::shared_ptr<const MacroStatistics> macro_;
    PathGainMatrix gains_;
    int sc_streams_ = 0;
    int sc_antennas_ = 0;
};

int total_streams(std::span<const int> macro_groups, const LinkGainTable& table);

/// Deterministic-equivalent SINR of a macro-served group g in `macro_groups`.
double macro_sinr_de(int g, std::span<const int> macro_groups, std::span<const int> active_cells,
                     const LinkGainTable& table, const TransmitPowers& powers);

/// Deterministic-equivalent SINR of group `victim` served by the small cell of
/// group `serving` (victim == serving for the cell's own group).
double smallcell_sinr_de(int victim, int serving, std::span<const int> macro_groups,
                         std::span<const int> active_cells, const LinkGainTable& table,
                         const TransmitPowers& powers);

inline double smallcell_sinr_de(int f, std::span<const int> macro_groups, std::span<const int> active_cells,
                                const LinkGainTable& table, const TransmitPowers& powers)
{
    return smallcell_sinr_de(f, f, macro_groups, active_cells, table, powers);
}

} // namespace hetnet

#endif // HETNET_DETEQUIV_HPP
