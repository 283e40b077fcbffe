#include "hetnet/detequiv.hpp"

#include <algorithm>
#include <numeric>

namespace hetnet {

double FixedPointSolution::update(double x) const
{
    if (!(x > 0)) throw InvalidArgument("fixed-point update: argument must be positive");
    const double load = static_cast<double>(streams) / prebeam_dim;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) acc += spectrum(i) * x / (x + load * spectrum(i));
    return acc / prebeam_dim;
}

FixedPointSolution solve_fixed_point_projected(const Eigen::MatrixXcd& projected, int streams,
                                               FixedPointOptions options)
{
    if (projected.rows() != projected.cols() || projected.rows() == 0)
        throw InvalidArgument("solve_fixed_point: projected covariance must be square and nonempty");
    if (streams < 0) throw InvalidArgument("solve_fixed_point: streams must be nonnegative");

    const int b = static_cast<int>(projected.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (projected + projected.adjoint()));
    if (eig.info() != Eigen::Success) throw Error("solve_fixed_point: eigendecomposition failed");

    FixedPointSolution fp;
    fp.prebeam_dim = b;
    fp.streams = streams;
    fp.spectrum = eig.eigenvalues().cwiseMax(0.0);

    const double top = fp.spectrum.maxCoeff();
    const int rank = static_cast<int>((fp.spectrum.array() > 1e-10 * std::max(top, 1e-300)).count());
    if (top <= 0.0 || streams >= rank)
        throw DegenerateLoadingError("degenerate loading: " + std::to_string(streams) +
                                     " streams against rank " + std::to_string(rank));

    // Diagonal in the eigenbasis of A, so the matrix system reduces to a
    // scalar equation m = u(m). u is concave, so Newton on m - u(m) from the
    // right of the root is monotone; plain iteration crawls when S is close to b.
    const double load = static_cast<double>(streams) / b;
    double m = fp.spectrum.sum() / b;
    for (fp.iterations = 1; fp.iterations <= options.max_iter; ++fp.iterations) {
        double u = 0.0, du = 0.0;
        for (Eigen::Index i = 0; i < fp.spectrum.size(); ++i) {
            const double lam = fp.spectrum(i), den = m + load * lam;
            u += lam * m / den;
            du += load * lam * lam / (den * den);
        }
        u /= b;
        du /= b;
        const double step = (m - u) / (1.0 - du);
        const double next = step < m ? m - step : 0.5 * m;
        const double change = std::abs(next - m);
        m = next;
        if (change <= options.tol * m) {
            fp.converged = true;
            break;
        }
    }
    if (!fp.converged) throw ConvergenceError("solve_fixed_point: no convergence", m);
    fp.iterations = std::min(fp.iterations, options.max_iter);

    const Eigen::ArrayXd t = 1.0 + load * fp.spectrum.array() / m;
    const Eigen::MatrixXcd& u = eig.eigenvectors();
    fp.m = m;
    fp.T = u * t.cast<cplx>().matrix().asDiagonal() * u.adjoint();
    const Eigen::ArrayXd w = fp.spectrum.array() / t.square();
    fp.weight = u * w.cast<cplx>().matrix().asDiagonal() * u.adjoint();
    fp.F = load / b * (fp.spectrum.array().square() / t.square()).sum() / (m * m);
    return fp;
}

Eigen::VectorXcd lag_kernel(const Eigen::MatrixXcd& prebeamformer, const FixedPointSolution& source)
{
    const Eigen::MatrixXcd k = prebeamformer * source.weight * prebeamformer.adjoint();
    const Eigen::Index n = k.rows();
    Eigen::VectorXcd s(n);
    for (Eigen::Index lag = 0; lag < n; ++lag) {
        s(lag) = k.diagonal(lag).sum();
        if (lag > 0) s(lag) *= 2.0;
    }
    return s;
}

TransmitPowers transmit_powers(const SimParams& params)
{
    TransmitPowers p;
    p.macro = db_to_linear(params.cell_edge_snr_db) *
              (1.0 + std::pow(params.cell_radius / params.cutoff_distance, params.pathloss_exponent));
    p.small_cell = p.macro * db_to_linear(params.small_cell_power_offset_db);
    return p;
}

namespace {

// A handful of groups end up with effective rank one (or a spectrum too flat
// for floor(beta r) streams); their pre-beamformer is widened one eigenvector
// at a time until the fixed point has a positive solution.
FixedPointSolution solve_group(GroupChannelModel& model, bool& widened)
{
    FixedPointOptions options;
    options.max_iter = 20000;
    widened = false;
    const Eigen::MatrixXcd r = model.covariance();
    while (true) {
        const Eigen::MatrixXcd& b = model.eig.prebeamformer;
        try {
            return solve_fixed_point_projected(b.adjoint() * r * b, model.eig.streams, options);
        } catch (const DegenerateLoadingError&) {
            if (model.eig.prebeam_dim >= r.rows()) throw;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(r);
        const int dim = model.eig.prebeam_dim + 1;
        model.eig.prebeamformer = solver.eigenvectors().rightCols(dim).rowwise().reverse();
        model.eig.prebeam_dim = dim;
        widened = true;
    }
}

} // namespace

MacroStatistics build_macro_statistics(const Layout& layout, const SimParams& params)
{
    MacroStatistics stats;
    stats.models = build_group_models(layout, params);
    const int n = layout.size();
    const int antennas = params.macro_antennas;
    stats.fixed_points.resize(n);
    stats.direct.resize(n);

    Eigen::MatrixXcd rho(n, antennas);   // victims' correlation rows
    Eigen::MatrixXcd kernel(antennas, n); // sources' scaled lag kernels
    for (int g = 0; g < n; ++g) {
        auto& model = stats.models[g];
        bool widened = false;
        stats.fixed_points[g] = solve_group(model, widened);
        if (widened) stats.widened.push_back(g);
        const auto& fp = stats.fixed_points[g];
        if (!(fp.F < 1.0)) throw Error("build_macro_statistics: F >= 1 for group " + std::to_string(g));
        stats.direct(g) = fp.prebeam_dim * fp.m;
        rho.row(g) = model.correlation.transpose();
        kernel.col(g) = lag_kernel(model.prebeamformer(), fp) / (fp.prebeam_dim * (1.0 - fp.F) * fp.m);
    }
    stats.cross = (rho * kernel).real().cwiseMax(0.0);
    stats.cross.diagonal().setZero();
    return stats;
}

LinkGainTable::LinkGainTable(std::shared_ptr<const MacroStatistics> macro, const Layout& layout,
                             const SimParams& params)
    : macro_(std::move(macro)), gains_(layout, params)
{
    if (!macro_ || static_cast<int>(macro_->models.size()) != layout.size())
        throw InvalidArgument("LinkGainTable: macro statistics do not match the layout");
    sc_antennas_ = params.small_cell_antennas;
    sc_streams_ = static_cast<int>(std::floor(params.loading * params.small_cell_antennas));
}

int total_streams(std::span<const int> macro_groups, const LinkGainTable& table)
{
    int s = 0;
    for (int g : macro_groups) s += table.streams(g);
    return s;
}

double macro_sinr_de(int g, std::span<const int> macro_groups, std::span<const int> active_cells,
                     const LinkGainTable& table, const TransmitPowers& powers)
{
    if (macro_groups.empty()) throw InvalidArgument("macro_sinr_de: empty schedule");
    if (std::find(macro_groups.begin(), macro_groups.end(), g) == macro_groups.end())
        throw InvalidArgument("macro_sinr_de: group is not scheduled");
    const double per_stream = powers.macro / total_streams(macro_groups, table);
    double interference = 0.0;
    for (int src : macro_groups)
        if (src != g) interference += table.i_mc(g, src) * table.streams(src) * per_stream;
    for (int f : active_cells) interference += table.j_sc(g, f) * powers.small_cell;
    return table.d_mc(g) * per_stream / (1.0 + interference);
}

double smallcell_sinr_de(int victim, int serving, std::span<const int> macro_groups,
                         std::span<const int> active_cells, const LinkGainTable& table,
                         const TransmitPowers& powers)
{
    if (std::find(active_cells.begin(), active_cells.end(), serving) == active_cells.end())
        throw InvalidArgument("smallcell_sinr_de: serving small cell is not active");
    double interference = 0.0;
    if (!macro_groups.empty()) {
        const double per_stream = powers.macro / total_streams(macro_groups, table);
        for (int g : macro_groups) interference += table.j_mc(victim, g) * table.streams(g) * per_stream;
    }
    for (int f : active_cells)
        if (f != serving) interference += table.i_sc(victim, f) * powers.small_cell;
    return table.d_sc(victim, serving) * powers.small_cell / table.sc_streams() / (1.0 + interference);
}

} // namespace hetnet
