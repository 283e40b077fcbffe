#ifndef HETNET_CHANNEL_HPP
#define HETNET_CHANNEL_HPP

#include "hetnet/common.hpp"
#include "hetnet/geometry.hpp"

#include <vector>

namespace hetnet {

/// Node id of the macro base station in path-gain and wall-count queries.
inline constexpr int kMacro = -1;

/// w^{n_w} / (1 + (d/d0)^alpha), with w given in dB of loss.
double path_gain(double distance, int walls, const SimParams& params);

/// Walls crossed between the transmitters/receivers co-located with two nodes.
/// Zero on the diagonal, one across the tier boundary, two between distinct
/// small-cell groups. Both-macro-side pairs and the macro itself count zero.
int wall_count(int a, int b, const Layout& layout);

/// Symmetric table of path gains between the macro (kMacro) and all groups.
class PathGainMatrix {
public:
    PathGainMatrix() = default;
    PathGainMatrix(const Layout& layout, const SimParams& params);

    double operator()(int a, int b) const { return gain_(a + 1, b + 1); }
    int walls(int a, int b) const { return walls_(a + 1, b + 1); }
    int num_groups() const { return static_cast<int>(gain_.rows()) - 1; }

private:
    Eigen::MatrixXd gain_;
    Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic> walls_;
};

/// Closed interval of the normalised spatial frequency -sin(alpha)/2 covered
/// by angles alpha in [theta - delta, theta + delta].
struct AngularInterval {
    double lo = 0.0;
    double hi = 0.0;
};

AngularInterval angular_interval(double theta, double delta);

/// Closed-interval test: touching endpoints count as overlap.
inline bool disjoint(const AngularInterval& a, const AngularInterval& b)
{
    return a.hi < b.lo || b.hi < a.lo;
}

/// First column rho(k) = R[k, 0], k = 0..M-1, of the one-ring covariance
///   R[m, n] = gain / (2 delta) * int_{theta-delta}^{theta+delta} exp(-j pi (m-n) sin a) da.
/// Each lag is integrated by composite 64-point Gauss-Legendre, doubling panels
/// until the change is below 1e-12 of the interval width.
Eigen::VectorXcd one_ring_correlation(double theta, double delta, double gain, int antennas);

/// Hermitian Toeplitz matrix with first column `column`.
Eigen::MatrixXcd toeplitz_hermitian(const Eigen::VectorXcd& column);

Eigen::MatrixXcd one_ring_covariance(double theta, double delta, double gain, int antennas);

/// Dominant eigen-structure of a covariance: the pre-beamformer is the
/// effective-rank eigenbasis, streams = max(1, floor(beta * rank)).
struct EigenModel {
    Eigen::VectorXd eigenvalues;      // all M, descending; negligible tail reported as zero
    Eigen::MatrixXcd prebeamformer;   // M x rank, orthonormal columns
    int rank = 0;
    int prebeam_dim = 0;
    int streams = 0;
};

EigenModel eigen_model(const Eigen::MatrixXcd& covariance, double loading, double rank_threshold = 1e-3);

/// Karhunen-Loeve factor U Lambda^{1/2} over every eigenvalue above
/// `relative_floor * trace`, so that h = factor * w with w ~ CN(0, I) has covariance R.
Eigen::MatrixXcd covariance_factor(const Eigen::MatrixXcd& covariance, double relative_floor = 1e-12);

/// Second-order model of the macro-to-group channel.
struct GroupChannelModel {
    double theta = 0.0;
    double delta = 0.0;
    double gain = 0.0;               // a_{g,0}
    Eigen::VectorXcd correlation;    // Toeplitz first column of R
    EigenModel eig;
    AngularInterval interval;

    Eigen::MatrixXcd covariance() const { return toeplitz_hermitian(correlation); }
    const Eigen::MatrixXcd& prebeamformer() const { return eig.prebeamformer; }
    int streams() const { return eig.streams; }
    int prebeam_dim() const { return eig.prebeam_dim; }
};

GroupChannelModel build_group_model(double theta, double delta, double gain, const SimParams& params);

/// Models for every group of a layout (independent of the small-cell set).
std::vector<GroupChannelModel> build_group_models(const Layout& layout, const SimParams& params);

} // namespace hetnet

#endif // HETNET_CHANNEL_HPP
