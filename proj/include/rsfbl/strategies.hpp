#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rsfbl/channel.hpp"
#include "rsfbl/config.hpp"
#include "rsfbl/solution.hpp"

namespace rsfbl::strat {

/// Outcome of one strategy on one channel realization. `candidates` is the
/// blocklength-split trace (l_c -> objective) and stays empty outside C-RSMA.
struct StrategyRun {
    std::string strategy;  // "RSMA", "C-RSMA", "SDMA", "NOMA"
    std::string mode;      // "fin", "inf", "inf-fin"
    core::Solution solution;
    std::vector<std::pair<long, double>> candidates;
};

StrategyRun solve_rsma(const chan::ChannelSet& channels, const core::SystemConfig& config);
StrategyRun solve_sdma(const chan::ChannelSet& channels, const core::SystemConfig& config);
StrategyRun solve_noma(const chan::ChannelSet& channels, const core::SystemConfig& config);
StrategyRun solve_crsma(const chan::ChannelSet& channels, const core::SystemConfig& config);

/// Dispatch on config.strategy.
StrategyRun solve(const chan::ChannelSet& channels, const core::SystemConfig& config);

/// Re-evaluates an infinite-blocklength design under the finite-blocklength
/// penalty, keeping precoders and time split fixed and re-splitting only the
/// common rate (exact water-fill toward the bottleneck groups).
StrategyRun evaluate_inf_fin(const chan::ChannelSet& channels,
                             const core::SystemConfig& config,
                             const core::Solution& inf_solution);

/// Successive-decoding order: user indices (0-based) sorted by descending
/// channel norm, ties broken by index.
std::vector<int> noma_decoding_order(const chan::ChannelSet& channels);

/// Per-group rates of a private-only design under successive decoding; the
/// rate of a message is the minimum over every user that must decode it.
Eigen::VectorXd noma_group_rates(const chan::ChannelSet& channels,
                                 const core::SystemConfig& config,
                                 const Eigen::MatrixXcd& precoders, long l_n);

}  // namespace rsfbl::strat
