#include "hetnet/mcoracle.hpp"

#include <algorithm>

namespace hetnet {

namespace {

// Polar method in bulk: points uniform in the unit disk, then one vectorised
// log for the whole block. Each accepted point is one CN(0, variance) sample.
Eigen::MatrixXcd complex_gaussian(Eigen::Index rows, Eigen::Index cols, double variance, Rng& rng)
{
    const Eigen::Index n = rows * cols;
    Eigen::MatrixXcd out(rows, cols);
    Eigen::ArrayXd radius2(n);
    constexpr double kUnit = 1.0 / 4503599627370496.0;  // 2^-52
    for (Eigen::Index i = 0; i < n; ++i) {
        double x, y, s;
        do {
            x = (rng() >> 11) * kUnit - 1.0;
            y = (rng() >> 11) * kUnit - 1.0;
            s = x * x + y * y;
        } while (s >= 1.0 || s == 0.0);
        out.data()[i] = cplx(x, y);
        radius2(i) = s;
    }
    const Eigen::ArrayXd scale = (-variance * radius2.log() / radius2).sqrt();
    Eigen::Map<Eigen::ArrayXcd>(out.data(), n) *= scale.cast<cplx>();
    return out;
}

// ||x^H B P||^2 summed over the columns of X, one value per column of X.
Eigen::VectorXd leakage(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& beams)
{
    return (x.adjoint() * beams).rowwise().squaredNorm();
}

} // namespace

ChannelSampler::ChannelSampler(const LinkGainTable& table, std::span<const int> macro_groups,
                               std::span<const int> active_cells)
    : table_(&table), macro_groups_(macro_groups.begin(), macro_groups.end()),
      active_cells_(active_cells.begin(), active_cells.end())
{
    const auto& models = table.macro().models;
    for (int g : macro_groups_) macro_factor_.push_back(covariance_factor(models.at(g).covariance()));
    for (int f : active_cells_) cell_factor_.push_back(covariance_factor(models.at(f).covariance()));
}

ChannelRealization ChannelSampler::draw_macro_tier(Rng& rng) const
{
    const LinkGainTable& t = *table_;
    const int sc = t.sc_streams();
    const int l = t.sc_antennas();
    ChannelRealization out;
    out.macro_groups = macro_groups_;
    out.active_cells = active_cells_;
    for (std::size_t i = 0; i < macro_groups_.size(); ++i) {
        const auto& f = macro_factor_[i];
        out.macro.push_back(f * complex_gaussian(f.cols(), t.streams(macro_groups_[i]), 1.0, rng));
    }
    for (const auto& f : cell_factor_) out.macro_to_cells.push_back(f * complex_gaussian(f.cols(), sc, 1.0, rng));
    out.cell_to_macro.resize(active_cells_.size());
    for (std::size_t j = 0; j < active_cells_.size(); ++j)
        for (int g : macro_groups_)
            out.cell_to_macro[j].push_back(complex_gaussian(l, t.streams(g), t.j_sc(g, active_cells_[j]), rng));
    return out;
}

namespace {

std::vector<std::vector<Eigen::MatrixXcd>> draw_cell_to_cells(const LinkGainTable& t, std::span<const int> cells,
                                                              Rng& rng)
{
    std::vector<std::vector<Eigen::MatrixXcd>> out(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j)
        for (int v : cells)
            out[j].push_back(complex_gaussian(t.sc_antennas(), t.sc_streams(), t.i_sc(v, cells[j]), rng));
    return out;
}

std::vector<Eigen::MatrixXcd> cell_precoders(const ChannelRealization& channels)
{
    std::vector<Eigen::MatrixXcd> out;
    for (std::size_t j = 0; j < channels.active_cells.size(); ++j)
        out.push_back(zf_columns(channels.cell_to_cells[j][j]));
    return out;
}

} // namespace

ChannelRealization ChannelSampler::draw(Rng& macro_rng, Rng& cell_rng) const
{
    ChannelRealization out = draw_macro_tier(macro_rng);
    out.cell_to_cells = draw_cell_to_cells(*table_, active_cells_, cell_rng);
    return out;
}

CellTierDraw ChannelSampler::draw_cell_tier(Rng& rng) const
{
    ChannelRealization channels;
    channels.active_cells = active_cells_;
    for (int attempt = 0;; ++attempt) {
        channels.cell_to_cells = draw_cell_to_cells(*table_, active_cells_, rng);
        try {
            return reduce_cell_tier(channels, cell_precoders(channels));
        } catch (const RankDeficientError&) {
            if (attempt >= 10) throw;
        }
    }
}

ChannelRealization draw_channels(const LinkGainTable& table, std::span<const int> macro_groups,
                                 std::span<const int> active_cells, Rng& rng)
{
    return ChannelSampler(table, macro_groups, active_cells).draw(rng);
}

std::string_view to_string(ZfNormalization mode)
{
    return mode == ZfNormalization::PerGroup ? "group" : "column";
}

ZfNormalization parse_zf_normalization(std::string_view text)
{
    if (text == "group") return ZfNormalization::PerGroup;
    if (text == "column") return ZfNormalization::PerColumn;
    throw InvalidArgument("unknown ZF normalization '" + std::string(text) + "' (expected group or column)");
}

namespace {

Eigen::MatrixXcd pseudo_inverse(const Eigen::MatrixXcd& effective)
{
    const Eigen::MatrixXcd gram = effective.adjoint() * effective;
    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    const double scale = gram.diagonal().real().maxCoeff();
    if (llt.info() != Eigen::Success || !(scale > 0))
        throw RankDeficientError("effective channel is rank deficient; resample users");
    const double pivot = llt.matrixL().toDenseMatrix().diagonal().real().minCoeff();
    if (pivot * pivot < 1e-12 * scale) throw RankDeficientError("effective channel is rank deficient; resample users");
    return effective * llt.solve(Eigen::MatrixXcd::Identity(gram.rows(), gram.cols()));
}

} // namespace

Eigen::MatrixXcd zf_columns(const Eigen::MatrixXcd& effective)
{
    Eigen::MatrixXcd p = pseudo_inverse(effective);
    p.array().rowwise() /= p.colwise().norm().array().cast<cplx>();
    return p;
}

Eigen::MatrixXcd zf_group(const Eigen::MatrixXcd& effective)
{
    Eigen::MatrixXcd p = pseudo_inverse(effective);
    p *= std::sqrt(double(p.cols())) / p.norm();
    return p;
}

Eigen::MatrixXcd zf(const Eigen::MatrixXcd& effective, ZfNormalization mode)
{
    return mode == ZfNormalization::PerGroup ? zf_group(effective) : zf_columns(effective);
}

namespace {

std::vector<Eigen::MatrixXcd> macro_precoders(const ChannelRealization& channels, const LinkGainTable& table,
                                              ZfNormalization mode)
{
    std::vector<Eigen::MatrixXcd> out;
    const auto& models = table.macro().models;
    for (std::size_t i = 0; i < channels.macro_groups.size(); ++i) {
        const auto& b = models[channels.macro_groups[i]].prebeamformer();
        out.push_back(zf(b.adjoint() * channels.macro[i], mode));
    }
    return out;
}

} // namespace

Precoders zf_precoders(const ChannelRealization& channels, const LinkGainTable& table, ZfNormalization macro_mode)
{
    return Precoders{macro_precoders(channels, table, macro_mode), cell_precoders(channels)};
}

CellTierDraw reduce_cell_tier(const ChannelRealization& channels, std::vector<Eigen::MatrixXcd> cell_precoders)
{
    const std::size_t n = channels.active_cells.size();
    if (cell_precoders.size() != n || channels.cell_to_cells.size() != n)
        throw InvalidArgument("reduce_cell_tier: one precoder and one channel row per active cell required");
    CellTierDraw out;
    for (std::size_t j = 0; j < n; ++j) {
        const Eigen::MatrixXcd& own = channels.cell_to_cells[j][j];
        out.signal.push_back((own.adjoint() * cell_precoders[j]).diagonal().cwiseAbs2());
        Eigen::VectorXd leak = Eigen::VectorXd::Zero(own.cols());
        for (std::size_t k = 0; k < n; ++k)
            if (k != j) leak += leakage(channels.cell_to_cells[k][j], cell_precoders[k]);
        out.leakage.push_back(std::move(leak));
    }
    out.precoders = std::move(cell_precoders);
    return out;
}

EmpiricalSinr empirical_sinr(const ChannelRealization& channels, const Precoders& precoders,
                             const LinkGainTable& table, const TransmitPowers& powers)
{
    return empirical_sinr(channels, precoders.macro, reduce_cell_tier(channels, precoders.cells), table, powers);
}

EmpiricalSinr empirical_sinr(const ChannelRealization& channels, const std::vector<Eigen::MatrixXcd>& macro_precoders,
                             const CellTierDraw& cell_tier, const LinkGainTable& table, const TransmitPowers& powers)
{
    const auto& models = table.macro().models;
    const auto& groups = channels.macro_groups;
    const auto& cells = channels.active_cells;
    const double macro_power = groups.empty() ? 0.0 : powers.macro / total_streams(groups, table);
    const double cell_power = powers.small_cell / table.sc_streams();

    std::vector<Eigen::MatrixXcd> beams;  // B_g P_g, M x S_g
    for (std::size_t i = 0; i < groups.size(); ++i)
        beams.push_back(models[groups[i]].prebeamformer() * macro_precoders[i]);

    EmpiricalSinr out;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const Eigen::MatrixXcd& h = channels.macro[i];
        const Eigen::VectorXd signal = (h.adjoint() * beams[i]).diagonal().cwiseAbs2() * macro_power;
        Eigen::VectorXd noise = Eigen::VectorXd::Ones(h.cols());
        for (std::size_t k = 0; k < groups.size(); ++k)
            if (k != i) noise += leakage(h, beams[k]) * macro_power;
        for (std::size_t j = 0; j < cells.size(); ++j)
            noise += leakage(channels.cell_to_macro[j][i], cell_tier.precoders[j]) * cell_power;
        out.macro.push_back(signal.cwiseQuotient(noise));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
        Eigen::VectorXd noise = Eigen::VectorXd::Ones(cell_tier.signal[j].size()) + cell_tier.leakage[j] * cell_power;
        for (std::size_t k = 0; k < groups.size(); ++k)
            noise += leakage(channels.macro_to_cells[j], beams[k]) * macro_power;
        out.cells.push_back((cell_tier.signal[j] * cell_power).cwiseQuotient(noise));
    }
    return out;
}

double median(std::vector<double> values)
{
    if (values.empty()) throw InvalidArgument("median: empty sample");
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (values.size() % 2 == 1) return *mid;
    const double hi = *mid;
    return 0.5 * (hi + *std::max_element(values.begin(), mid));
}

SinrMedians empirical_sinr_medians(const ChannelSampler& sampler, const TransmitPowers& powers,
                                   std::span<const CellTierDraw> cell_draws, Rng& macro_rng,
                                   ZfNormalization macro_mode)
{
    if (cell_draws.empty()) throw InvalidArgument("empirical_sinr_medians: no draws");
    std::vector<std::vector<double>> macro_samples, cell_samples;
    int resamples = 0;
    for (const CellTierDraw& cells : cell_draws) {
        ChannelRealization channels;
        std::vector<Eigen::MatrixXcd> precoders;
        while (true) {
            channels = sampler.draw_macro_tier(macro_rng);
            try {
                precoders = macro_precoders(channels, sampler.table(), macro_mode);
                break;
            } catch (const RankDeficientError&) {
                if (++resamples > 10 * static_cast<int>(cell_draws.size())) throw;
            }
        }
        const EmpiricalSinr sinr = empirical_sinr(channels, precoders, cells, sampler.table(), powers);
        macro_samples.resize(sinr.macro.size());
        cell_samples.resize(sinr.cells.size());
        for (std::size_t i = 0; i < sinr.macro.size(); ++i)
            macro_samples[i].insert(macro_samples[i].end(), sinr.macro[i].begin(), sinr.macro[i].end());
        for (std::size_t j = 0; j < sinr.cells.size(); ++j)
            cell_samples[j].insert(cell_samples[j].end(), sinr.cells[j].begin(), sinr.cells[j].end());
    }
    SinrMedians out;
    for (auto& s : macro_samples) out.macro.push_back(median(std::move(s)));
    for (auto& s : cell_samples) out.cells.push_back(median(std::move(s)));
    return out;
}

} // namespace hetnet
