#include "rsfbl/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rsfbl::core {

using nlohmann::json;

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::Rsma: return "RSMA";
        case Strategy::Crsma: return "C-RSMA";
        case Strategy::Sdma: return "SDMA";
        case Strategy::Noma: return "NOMA";
    }
    return "?";
}

std::string to_string(BlocklengthMode m) {
    return m == BlocklengthMode::Finite ? "finite" : "infinite";
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "RSMA") return Strategy::Rsma;
    if (s == "C-RSMA") return Strategy::Crsma;
    if (s == "SDMA") return Strategy::Sdma;
    if (s == "NOMA") return Strategy::Noma;
    throw std::invalid_argument("unknown strategy: " + s);
}

BlocklengthMode mode_from_string(const std::string& s) {
    if (s == "finite") return BlocklengthMode::Finite;
    if (s == "infinite") return BlocklengthMode::Infinite;
    throw std::invalid_argument("unknown blocklength mode: " + s);
}

double default_bler(Strategy s) {
    return s == Strategy::Sdma ? 1e-5 : 5e-6;
}

int SystemConfig::num_users() const {
    int k = 0;
    for (const auto& g : groups) k += static_cast<int>(g.size());
    return k;
}

std::vector<std::string> validate(const SystemConfig& config) {
    std::vector<std::string> errors;
    if (config.n_tx < 1) errors.push_back("n_tx must be a positive integer");
    const int k_total = config.num_users();
    if (k_total == 0) errors.push_back("no users: groups are empty");
    if (config.groups.empty()) errors.push_back("at least one group is required");

    std::set<int> seen;
    bool overlap = false;
    for (const auto& g : config.groups) {
        if (g.empty()) errors.push_back("empty group");
        for (int u : g) {
            if (!seen.insert(u).second) overlap = true;
        }
    }
    if (overlap) errors.push_back("groups overlap: a user appears in more than one group");
    for (int u : seen) {
        if (u < 1 || u > k_total) {
            errors.push_back("user indices must cover exactly 1.." + std::to_string(k_total));
            break;
        }
    }
    if (static_cast<int>(seen.size()) != k_total) {
        errors.push_back("groups must partition 1..K");
    }

    if (static_cast<int>(config.channel_variances.size()) != k_total) {
        errors.push_back("channel_variances size must equal the user count");
    }
    for (double v : config.channel_variances) {
        if (!(v > 0.0)) {
            errors.push_back("channel variances must be > 0");
            break;
        }
    }
    if (!(config.p_tx > 0.0)) errors.push_back("p_tx must be > 0");
    if (config.p_relay < 0.0) errors.push_back("p_relay must be >= 0");
    if (!(config.relay_variance > 0.0)) errors.push_back("relay_variance must be > 0");
    const double eps = config.effective_bler();
    if (!(eps > 0.0 && eps < 0.5)) errors.push_back("bler must lie in (0, 0.5)");
    if (config.l_total < 1) errors.push_back("l_total must be a positive integer");
    if (!(config.sca_tolerance > 0.0)) errors.push_back("sca_tolerance must be > 0");
    if (config.lc_grid.start < 1 || config.lc_grid.step < 1) {
        errors.push_back("lc_grid start and step must be positive");
    }

    if (config.strategy == Strategy::Crsma) {
        if (config.num_groups() < 2) errors.push_back("C-RSMA requires at least two groups");
        if (config.l_total < 2 * config.lc_grid.start) {
            errors.push_back("C-RSMA requires l_total >= " +
                             std::to_string(2 * config.lc_grid.start) +
                             " (one grid point for each phase)");
        }
    }
    if (config.strategy == Strategy::Noma) {
        for (const auto& g : config.groups) {
            if (g.size() != 1) {
                errors.push_back("NOMA requires singleton groups");
                break;
            }
        }
    }
    return errors;
}

int group_of(const SystemConfig& config, int k) {
    if (k < 1 || k > config.num_users()) {
        throw std::out_of_range("group_of: user index " + std::to_string(k) + " out of range");
    }
    for (int m = 0; m < config.num_groups(); ++m) {
        const auto& g = config.groups[m];
        if (std::find(g.begin(), g.end(), k) != g.end()) return m + 1;
    }
    throw std::logic_error("group_of: user not assigned to any group");
}

std::string to_json(const SystemConfig& c) {
    json j;
    j["n_tx"] = c.n_tx;
    j["groups"] = c.groups;
    j["channel_variances"] = c.channel_variances;
    j["p_tx"] = c.p_tx;
    j["p_relay"] = c.p_relay;
    if (c.bler) j["bler"] = *c.bler;
    j["relay_variance"] = c.relay_variance;
    j["l_total"] = c.l_total;
    j["strategy"] = to_string(c.strategy);
    j["blocklength_mode"] = to_string(c.blocklength_mode);
    j["sca_tolerance"] = c.sca_tolerance;
    j["lc_grid"] = {{"start", c.lc_grid.start}, {"step", c.lc_grid.step}};
    return j.dump(2);
}

SystemConfig config_from_json(const std::string& text) {
    json j = json::parse(text);
    SystemConfig c;
    c.n_tx = j.at("n_tx").get<int>();
    c.groups = j.at("groups").get<std::vector<std::vector<int>>>();
    c.channel_variances = j.at("channel_variances").get<std::vector<double>>();
    c.p_tx = j.at("p_tx").get<double>();
    if (j.contains("p_relay")) c.p_relay = j["p_relay"].get<double>();
    if (j.contains("bler")) c.bler = j["bler"].get<double>();
    if (j.contains("relay_variance")) c.relay_variance = j["relay_variance"].get<double>();
    c.l_total = j.at("l_total").get<long>();
    c.strategy = strategy_from_string(j.at("strategy").get<std::string>());
    if (j.contains("blocklength_mode")) {
        c.blocklength_mode = mode_from_string(j["blocklength_mode"].get<std::string>());
    }
    if (j.contains("sca_tolerance")) c.sca_tolerance = j["sca_tolerance"].get<double>();
    if (j.contains("lc_grid")) {
        c.lc_grid.start = j["lc_grid"].at("start").get<long>();
        c.lc_grid.step = j["lc_grid"].at("step").get<long>();
    }
    return c;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

void save_config(const SystemConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << to_json(config) << "\n";
}

}  // namespace rsfbl::core
