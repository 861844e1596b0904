#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rsfbl::core {

enum class Strategy { Rsma, Crsma, Sdma, Noma };
enum class BlocklengthMode { Finite, Infinite };

std::string to_string(Strategy s);
std::string to_string(BlocklengthMode m);
Strategy strategy_from_string(const std::string& s);
BlocklengthMode mode_from_string(const std::string& s);

/// Default BLER target per strategy. RSMA/NOMA use a tighter target so the
/// end-to-end error probability after interference cancellation stays at the
/// SDMA level.
double default_bler(Strategy s);

struct LcGrid {
    long start = 100;
    long step = 10;
};

/// Full description of one system instance. Noise power is 1 everywhere;
/// SNR in dB maps to p_tx = 10^(dB/10).
struct SystemConfig {
    int n_tx = 1;                             // transmit antennas
    std::vector<std::vector<int>> groups;     // 1-based user indices, disjoint, covering 1..K
    std::vector<double> channel_variances;    // per-user, > 0
    double p_tx = 1.0;                        // linear transmit power
    double p_relay = 0.0;                     // linear relay power
    std::optional<double> bler;               // defaults per strategy when unset
    double relay_variance = 1.0;              // variance of inter-user relay channels
    long l_total = 100;                       // total channel uses
    Strategy strategy = Strategy::Rsma;
    BlocklengthMode blocklength_mode = BlocklengthMode::Finite;
    double sca_tolerance = 1e-3;
    LcGrid lc_grid;

    int num_users() const;
    int num_groups() const { return static_cast<int>(groups.size()); }
    double effective_bler() const { return bler ? *bler : default_bler(strategy); }
    bool finite() const { return blocklength_mode == BlocklengthMode::Finite; }
};

/// Returns the empty list when the config satisfies every invariant,
/// otherwise one message per violation.
std::vector<std::string> validate(const SystemConfig& config);

/// Group index (1-based) of user k (1-based). Throws when k is out of range.
int group_of(const SystemConfig& config, int k);

std::string to_json(const SystemConfig& config);
SystemConfig config_from_json(const std::string& text);
SystemConfig load_config(const std::string& path);
void save_config(const SystemConfig& config, const std::string& path);

}  // namespace rsfbl::core
