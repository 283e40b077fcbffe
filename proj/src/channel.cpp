#include "hetnet/channel.hpp"
#include "hetnet/quadrature.hpp"

#include <algorithm>
#include <random>

namespace hetnet {

double path_gain(double distance, int walls, const SimParams& params)
{
    const double w = db_to_linear(-params.wall_loss_db);
    return std::pow(w, walls) / (1.0 + std::pow(distance / params.cutoff_distance, params.pathloss_exponent));
}

int wall_count(int a, int b, const Layout& layout)
{
    if (a == b || a == kMacro || b == kMacro) return 0;
    return static_cast<int>(layout.has_small_cell(a)) + static_cast<int>(layout.has_small_cell(b));
}

PathGainMatrix::PathGainMatrix(const Layout& layout, const SimParams& params)
{
    const int n = layout.size();
    gain_.resize(n + 1, n + 1);
    walls_.resize(n + 1, n + 1);
    gain_(0, 0) = 1.0;
    walls_(0, 0) = 0;
    for (int g = 0; g < n; ++g) {
        const double a = path_gain(layout.dist_macro[g], 0, params);
        gain_(0, g + 1) = gain_(g + 1, 0) = a;
        walls_(0, g + 1) = walls_(g + 1, 0) = 0;
        for (int f = g; f < n; ++f) {
            const int nw = wall_count(g, f, layout);
            const double d = (layout.positions[g] - layout.positions[f]).norm();
            const double v = path_gain(d, nw, params);
            gain_(g + 1, f + 1) = gain_(f + 1, g + 1) = v;
            walls_(g + 1, f + 1) = walls_(f + 1, g + 1) = static_cast<std::int8_t>(nw);
        }
    }
}

AngularInterval angular_interval(double theta, double delta)
{
    const double a = theta - delta;
    const double b = theta + delta;
    double smax = std::max(std::sin(a), std::sin(b));
    double smin = std::min(std::sin(a), std::sin(b));
    if (a <= kPi / 2 && kPi / 2 <= b) smax = 1.0;
    if (a <= -kPi / 2 && -kPi / 2 <= b) smin = -1.0;
    return {-0.5 * smax, -0.5 * smin};
}

namespace {

// All lags share one node set; exp(-j pi k sin a) is advanced by recurrence in k.
Eigen::VectorXcd lag_integrals(double lo, double hi, int antennas, int panels)
{
    const auto rule = composite_gauss_legendre(lo, hi, panels);
    const auto n = static_cast<Eigen::Index>(rule.nodes.size());
    Eigen::VectorXcd base(n);
    Eigen::VectorXcd power = Eigen::VectorXcd::Ones(n);
    Eigen::Map<const Eigen::VectorXd> weights(rule.weights.data(), n);
    for (Eigen::Index i = 0; i < n; ++i) base(i) = std::polar(1.0, -kPi * std::sin(rule.nodes[i]));
    Eigen::VectorXcd out(antennas);
    for (int k = 0; k < antennas; ++k) {
        out(k) = (weights.cast<cplx>().array() * power.array()).sum();
        power.array() *= base.array();
    }
    return out;
}

} // namespace

Eigen::VectorXcd one_ring_correlation(double theta, double delta, double gain, int antennas)
{
    if (!(delta > 0)) throw InvalidArgument("one_ring_correlation: delta must be positive");
    if (antennas < 1) throw InvalidArgument("one_ring_correlation: antennas must be positive");

    const double width = 2.0 * delta;
    // ~40 radians of phase per 64-node panel at the largest lag
    int panels = std::max(1, static_cast<int>(std::ceil(kPi * (antennas - 1) * width / 40.0)));
    Eigen::VectorXcd coarse = lag_integrals(theta - delta, theta + delta, antennas, panels);
    constexpr int kMaxPanels = 1 << 14;
    while (true) {
        panels *= 2;
        if (panels > kMaxPanels) throw QuadratureError("one_ring_correlation: quadrature did not converge");
        Eigen::VectorXcd fine = lag_integrals(theta - delta, theta + delta, antennas, panels);
        const double change = (fine - coarse).cwiseAbs().maxCoeff() / width;
        coarse = std::move(fine);
        if (change <= 1e-12) break;
    }
    Eigen::VectorXcd column = gain * coarse / width;
    column(0) = gain;
    return column;
}

Eigen::MatrixXcd toeplitz_hermitian(const Eigen::VectorXcd& column)
{
    const Eigen::Index n = column.size();
    Eigen::MatrixXcd r(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            r(i, j) = column(i - j);
            r(j, i) = std::conj(column(i - j));
        }
        r(j, j) = column(0).real();
    }
    return r;
}

Eigen::MatrixXcd one_ring_covariance(double theta, double delta, double gain, int antennas)
{
    return toeplitz_hermitian(one_ring_correlation(theta, delta, gain, antennas));
}

namespace {

// Sparse columns of the unitary Q with Q^H R Q real for centro-Hermitian R
// (J R J = conj(R)): column j < n is (e_j + e_{M-1-j})/sqrt2, column M-1-j is
// i (e_j - e_{M-1-j})/sqrt2, and the middle column of odd M is e_n.
struct CentroColumn {
    Eigen::Index r0, r1;
    cplx c0, c1;
};

std::vector<CentroColumn> centro_basis(Eigen::Index m)
{
    const double s = 1.0 / std::sqrt(2.0);
    std::vector<CentroColumn> q(m);
    const Eigen::Index half = m / 2;
    for (Eigen::Index j = 0; j < half; ++j) {
        q[j] = {j, m - 1 - j, cplx(s, 0), cplx(s, 0)};
        q[m - 1 - j] = {j, m - 1 - j, cplx(0, s), cplx(0, -s)};
    }
    if (m % 2 == 1) q[half] = {half, half, cplx(1, 0), cplx(0, 0)};
    return q;
}

bool is_centro_hermitian(const Eigen::MatrixXcd& r, double scale)
{
    return (r.colwise().reverse().rowwise().reverse() - r.conjugate()).norm() <= 1e-9 * scale;
}

struct Spectrum {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors; // matching columns
};

template <class Mat>
struct Eigenpairs {
    Eigen::VectorXd values;  // ascending, length m
    Mat vectors;             // m x m
};

// Leading eigenpairs of a numerically low-rank self-adjoint matrix by
// subspace iteration on a growing block; eigenvalues below `negligible`
// times the trace are reported as zero with zero vectors. Falls back to a
// full decomposition once the block would exceed half the dimension or the
// residual check fails.
template <class Mat>
Eigenpairs<Mat> leading_eigenpairs(const Mat& a, double negligible = 1e-13)
{
    using Scalar = typename Mat::Scalar;
    const Eigen::Index m = a.rows();
    const double trace = std::real(a.trace());
    Rng rng(0x5eed);
    std::normal_distribution<double> normal;
    auto gaussian = [&] {
        if constexpr (Eigen::NumTraits<Scalar>::IsComplex) return Scalar(normal(rng), normal(rng));
        else return Scalar(normal(rng));
    };
    for (Eigen::Index k = 24; trace > 0 && 2 * k <= m; k += k / 2) {
        Mat block(m, k);
        for (Eigen::Index j = 0; j < block.size(); ++j) block.data()[j] = gaussian();
        for (int pass = 0; pass < 3; ++pass) {
            block = a * block;
            block = Eigen::HouseholderQR<Mat>(block).householderQ() * Mat::Identity(m, k);
        }
        Eigen::SelfAdjointEigenSolver<Mat> small(block.adjoint() * a * block);
        if (small.info() != Eigen::Success) break;
        if (small.eigenvalues()(0) > negligible * trace) continue;  // block too narrow
        const Mat v = block * small.eigenvectors();
        if ((a * v - v * small.eigenvalues().asDiagonal()).norm() > 1e-9 * trace) break;
        Eigenpairs<Mat> out{Eigen::VectorXd::Zero(m), Mat::Zero(m, m)};
        out.values.tail(k) = small.eigenvalues();
        out.vectors.rightCols(k) = v;
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Mat> full(a);
    if (full.info() != Eigen::Success) throw Error("eigen_model: eigendecomposition failed");
    return {full.eigenvalues(), full.eigenvectors()};
}

Spectrum real_reduced_spectrum(const Eigen::MatrixXcd& r)
{
    const Eigen::Index m = r.rows();
    const auto q = centro_basis(m);
    // reduced = Re(Q^H R Q), one column of R Q at a time
    Eigen::MatrixXd reduced(m, m);
    Eigen::VectorXcd rq(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        rq = q[j].c0 * r.col(q[j].r0);
        if (q[j].r1 != q[j].r0) rq += q[j].c1 * r.col(q[j].r1);
        for (Eigen::Index i = 0; i < m; ++i) {
            cplx v = std::conj(q[i].c0) * rq(q[i].r0);
            if (q[i].r1 != q[i].r0) v += std::conj(q[i].c1) * rq(q[i].r1);
            reduced(i, j) = v.real();
        }
    }
    reduced = 0.5 * (reduced + reduced.transpose()).eval();

    const auto pairs = leading_eigenpairs(reduced);
    Spectrum out;
    out.values = pairs.values;
    const Eigen::MatrixXd& v = pairs.vectors;
    out.vectors = Eigen::MatrixXcd::Zero(m, m);
    for (Eigen::Index c = 0; c < m; ++c) {
        if (out.values(c) == 0.0 && v.col(c).squaredNorm() == 0.0) continue;  // dropped tail
        for (Eigen::Index j = 0; j < m; ++j) {
            out.vectors(q[j].r0, c) += q[j].c0 * v(j, c);
            if (q[j].r1 != q[j].r0) out.vectors(q[j].r1, c) += q[j].c1 * v(j, c);
        }
    }
    return out;
}

Spectrum complex_spectrum(const Eigen::MatrixXcd& r)
{
    auto pairs = leading_eigenpairs(r);
    return {std::move(pairs.values), std::move(pairs.vectors)};
}

Spectrum hermitian_spectrum(const Eigen::MatrixXcd& r, double scale)
{
    return is_centro_hermitian(r, scale) ? real_reduced_spectrum(r) : complex_spectrum(r);
}

} // namespace

EigenModel eigen_model(const Eigen::MatrixXcd& covariance, double loading, double rank_threshold)
{
    if (covariance.rows() != covariance.cols() || covariance.rows() == 0)
        throw InvalidArgument("eigen_model: covariance must be square and nonempty");
    const double scale = std::max(covariance.norm(), 1e-300);
    if ((covariance - covariance.adjoint()).norm() > 1e-9 * scale)
        throw InvalidArgument("eigen_model: covariance is not Hermitian");

    // Toeplitz covariances are centro-Hermitian and reduce to a real symmetric problem.
    const Spectrum spectrum = hermitian_spectrum(covariance, scale);

    const Eigen::Index n = covariance.rows();
    EigenModel model;
    model.eigenvalues = spectrum.values.reverse().cwiseMax(0.0);
    const double trace = model.eigenvalues.sum();

    int rank = 0;
    double captured = 0.0;
    while (rank < n && captured < (1.0 - rank_threshold) * trace) captured += model.eigenvalues(rank++);
    model.rank = std::max(rank, 1);
    model.prebeam_dim = model.rank;
    model.streams = std::max(1, static_cast<int>(std::floor(loading * model.rank)));
    model.prebeamformer = spectrum.vectors.rightCols(model.rank).rowwise().reverse();
    return model;
}

Eigen::MatrixXcd covariance_factor(const Eigen::MatrixXcd& covariance, double relative_floor)
{
    const double scale = std::max(covariance.norm(), 1e-300);
    const Spectrum spectrum = hermitian_spectrum(covariance, scale);
    const double trace = spectrum.values.cwiseMax(0.0).sum();
    const Eigen::Index n = spectrum.values.size();
    Eigen::Index keep = 0;
    while (keep < n && spectrum.values(n - 1 - keep) > relative_floor * trace) ++keep;
    keep = std::max<Eigen::Index>(keep, 1);
    const Eigen::VectorXd root = spectrum.values.tail(keep).cwiseMax(0.0).cwiseSqrt();
    return spectrum.vectors.rightCols(keep) * root.cast<cplx>().asDiagonal();
}

GroupChannelModel build_group_model(double theta, double delta, double gain, const SimParams& params)
{
    GroupChannelModel model;
    model.theta = theta;
    model.delta = delta;
    model.gain = gain;
    model.correlation = one_ring_correlation(theta, delta, gain, params.macro_antennas);
    model.eig = eigen_model(model.covariance(), params.loading, params.rank_threshold);
    model.interval = angular_interval(theta, delta);
    return model;
}

std::vector<GroupChannelModel> build_group_models(const Layout& layout, const SimParams& params)
{
    std::vector<GroupChannelModel> models;
    models.reserve(layout.size());
    for (int g = 0; g < layout.size(); ++g)
        models.push_back(build_group_model(layout.theta[g], layout.delta[g],
                                           path_gain(layout.dist_macro[g], 0, params), params));
    return models;
}

} // namespace hetnet
