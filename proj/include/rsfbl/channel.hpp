#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rsfbl/config.hpp"

namespace rsfbl::chan {

/// One channel realization. Column k of `downlink` is the vector between the
/// transmitter and user k+1. `relay` holds the scalar links from relay-group
/// users (columns, in ascending user order) to every user (rows); rows of
/// relay-group users are unused. `relay` is empty for non-cooperative runs.
struct ChannelSet {
    Eigen::MatrixXcd downlink;  // n_tx x K
    Eigen::MatrixXcd relay;     // K x |G_1|, or 0x0
    std::uint64_t seed = 0;
    std::vector<double> variances;  // per-user downlink variance tags
    double relay_variance = 1.0;

    bool has_relay() const { return relay.size() > 0; }
};

struct ChannelEnsemble {
    std::vector<ChannelSet> realizations;
    std::uint64_t base_seed = 0;
    std::uint64_t fingerprint = 0;  // of the generating config
    std::string generator = "mt19937_64/box-muller/v1";
    bool has_relay = false;
};

/// splitmix64 step, used to derive independent per-realization and per-stream
/// seeds from one base seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);

/// Fingerprint of the channel-relevant config fields (topology, variances).
/// Strategy and power do not enter: realizations are shared across strategies.
std::uint64_t config_fingerprint(const core::SystemConfig& config);

/// Draws one realization. Downlink entries are i.i.d. CN(0, variance_k);
/// relay entries i.i.d. CN(0, relay_variance). The downlink stream is seeded
/// independently of the relay stream, so the downlink draw is identical
/// whether or not the relay table is requested.
ChannelSet sample_channels(const core::SystemConfig& config, std::uint64_t seed,
                           bool with_relay);
ChannelSet sample_channels(const core::SystemConfig& config, std::uint64_t seed);

/// count realizations with per-index seeds mix_seed(base_seed, i).
ChannelEnsemble make_ensemble(const core::SystemConfig& config, std::uint64_t base_seed,
                              int count, bool with_relay);

/// Persistence. Paths ending in ".json" use the text format; anything else
/// the binary format (magic + JSON header + little-endian binary64 payload).
/// Both round-trip every component exactly.
void save_ensemble(const ChannelEnsemble& ensemble, const std::string& path);
ChannelEnsemble load_ensemble(const std::string& path);
/// Loading against a config additionally checks fingerprint and dimensions.
ChannelEnsemble load_ensemble(const std::string& path, const core::SystemConfig& config);

}  // namespace rsfbl::chan
