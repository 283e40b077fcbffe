#ifndef HETNET_MCORACLE_HPP
#define HETNET_MCORACLE_HPP

#include "hetnet/detequiv.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace hetnet {

/// ZF effective channel lost full column rank; draw the users again.
class RankDeficientError : public Error {
public:
    using Error::Error;
};

/// Explicit fading draw for one slot. Users of a macro group g number S_g,
/// users of an active small cell number S (its own group). Small-cell channels
/// are indexed [transmitting cell][receiving block].
struct ChannelRealization {
    std::vector<int> macro_groups;
    std::vector<int> active_cells;
    std::vector<Eigen::MatrixXcd> macro;           // M x S_g, users of macro_groups[i]
    std::vector<Eigen::MatrixXcd> macro_to_cells;  // M x S, macro channel of the users of active_cells[j]
    std::vector<std::vector<Eigen::MatrixXcd>> cell_to_macro;  // [j][i]: L x S_g
    std::vector<std::vector<Eigen::MatrixXcd>> cell_to_cells;  // [j][k]: L x S
};

/// Small-cell side of a realization reduced to unit-power gains. It does not
/// involve the macro array, so one draw can be shared by several array sizes.
struct CellTierDraw {
    std::vector<Eigen::MatrixXcd> precoders;  // L x S per active cell
    std::vector<Eigen::VectorXd> signal;      // |h^H q|^2 per user
    std::vector<Eigen::VectorXd> leakage;     // summed over the other active cells
};

/// Covariance factors of every group involved in one schedule; built once and
/// reused across fading draws.
class ChannelSampler {
public:
    ChannelSampler(const LinkGainTable& table, std::span<const int> macro_groups, std::span<const int> active_cells);

    /// Every channel that reaches or leaves the macro array, plus the
    /// small-cell channels into macro users, comes from `macro_rng`; the
    /// small-cell to small-cell channels come from `cell_rng`.
    ChannelRealization draw(Rng& macro_rng, Rng& cell_rng) const;
    ChannelRealization draw(Rng& rng) const { return draw(rng, rng); }

    /// The `macro_rng` half of draw(); cell_to_cells is left empty.
    ChannelRealization draw_macro_tier(Rng& rng) const;
    /// The `cell_rng` half of draw(), already precoded and reduced; redraws
    /// rank-deficient small-cell channels.
    CellTierDraw draw_cell_tier(Rng& rng) const;

    const LinkGainTable& table() const { return *table_; }

private:
    const LinkGainTable* table_;
    std::vector<int> macro_groups_;
    std::vector<int> active_cells_;
    std::vector<Eigen::MatrixXcd> macro_factor_;
    std::vector<Eigen::MatrixXcd> cell_factor_;
};

/// Stand-alone draw following the Karhunen-Loeve representation.
ChannelRealization draw_channels(const LinkGainTable& table, std::span<const int> macro_groups,
                                 std::span<const int> active_cells, Rng& rng);

/// Scaling of the macro ZF stage. PerGroup uses one scalar per group so that
/// the S_g streams carry unit power on average, which puts every user of the
/// group at the same signal gain; PerColumn gives every beam unit norm.
enum class ZfNormalization { PerGroup, PerColumn };

std::string_view to_string(ZfNormalization mode);
ZfNormalization parse_zf_normalization(std::string_view text);

struct Precoders {
    std::vector<Eigen::MatrixXcd> macro;  // b_g x S_g, applied after B_g
    std::vector<Eigen::MatrixXcd> cells;  // L x S
};

/// Pseudo-inverse of a channel block (columns = users), every column scaled to unit norm.
Eigen::MatrixXcd zf_columns(const Eigen::MatrixXcd& effective);
/// Pseudo-inverse scaled by one scalar so that its squared Frobenius norm equals the column count.
Eigen::MatrixXcd zf_group(const Eigen::MatrixXcd& effective);
Eigen::MatrixXcd zf(const Eigen::MatrixXcd& effective, ZfNormalization mode);

/// Small cells always use unit-norm columns.
Precoders zf_precoders(const ChannelRealization& channels, const LinkGainTable& table,
                       ZfNormalization macro_mode = ZfNormalization::PerGroup);

CellTierDraw reduce_cell_tier(const ChannelRealization& channels, std::vector<Eigen::MatrixXcd> cell_precoders);

struct EmpiricalSinr {
    std::vector<Eigen::VectorXd> macro;  // per user of macro_groups[i]
    std::vector<Eigen::VectorXd> cells;  // per user of active_cells[j]
};

EmpiricalSinr empirical_sinr(const ChannelRealization& channels, const Precoders& precoders,
                             const LinkGainTable& table, const TransmitPowers& powers);

/// Same as above with the small-cell tier given in reduced form; only the
/// macro-tier channels of `channels` are read.
EmpiricalSinr empirical_sinr(const ChannelRealization& channels, const std::vector<Eigen::MatrixXcd>& macro_precoders,
                             const CellTierDraw& cells, const LinkGainTable& table, const TransmitPowers& powers);

/// Per-group empirical SINR medians, one fading draw per entry of
/// `cell_draws`, pooling all users of a group across draws. Rank-deficient
/// macro draws are redrawn.
struct SinrMedians {
    std::vector<double> macro;
    std::vector<double> cells;
};

SinrMedians empirical_sinr_medians(const ChannelSampler& sampler, const TransmitPowers& powers,
                                   std::span<const CellTierDraw> cell_draws, Rng& macro_rng,
                                   ZfNormalization macro_mode = ZfNormalization::PerGroup);

double median(std::vector<double> values);

} // namespace hetnet

#endif // HETNET_MCORACLE_HPP
