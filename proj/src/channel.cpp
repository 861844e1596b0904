#include "rsfbl/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rsfbl::chan {

using nlohmann::json;

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 finalizer over base + golden-ratio stride.
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

// Deterministic standard-normal stream: mt19937_64 (bit-exact per the C++
// standard) feeding Box-Muller. Fill order is documented by construction:
// see sample_channels.
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t seed) : rng_(seed) {}

    // One CN(0, variance) draw: independent N(0, variance/2) parts.
    std::complex<double> complex_normal(double variance) {
        double s = std::sqrt(variance / 2.0);
        auto [z0, z1] = pair();
        return {s * z0, s * z1};
    }

  private:
    std::pair<double, double> pair() {
        // u1 in (0, 1], u2 in [0, 1).
        double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    std::mt19937_64 rng_;
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string canonical_channel_key(const core::SystemConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << "ntx=" << c.n_tx << ";groups=";
    for (const auto& g : c.groups) {
        os << "[";
        for (int u : g) os << u << ",";
        os << "]";
    }
    os << ";var=";
    for (double v : c.channel_variances) os << v << ",";
    os << ";relay_var=" << c.relay_variance;
    return os.str();
}

std::vector<int> relay_targets(const core::SystemConfig& config) {
    // users outside G_1, ascending
    std::vector<int> out;
    for (int m = 1; m < config.num_groups(); ++m) {
        for (int u : config.groups[m]) out.push_back(u);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::uint64_t config_fingerprint(const core::SystemConfig& config) {
    return fnv1a(canonical_channel_key(config));
}

ChannelSet sample_channels(const core::SystemConfig& config, std::uint64_t seed,
                           bool with_relay) {
    const int k_total = config.num_users();
    ChannelSet set;
    set.seed = seed;
    set.relay_variance = config.relay_variance;
    set.variances.resize(k_total);
    set.downlink.resize(config.n_tx, k_total);

    // Per-user variance lookup (config lists them in user order 1..K).
    for (int k = 0; k < k_total; ++k) set.variances[k] = config.channel_variances[k];

    NormalStream down(mix_seed(seed, 1));
    for (int k = 0; k < k_total; ++k) {
        for (int n = 0; n < config.n_tx; ++n) {
            set.downlink(n, k) = down.complex_normal(set.variances[k]);
        }
    }

    if (with_relay) {
        std::vector<int> relays = config.groups.empty() ? std::vector<int>{} : config.groups[0];
        std::sort(relays.begin(), relays.end());
        set.relay = Eigen::MatrixXcd::Zero(k_total, static_cast<int>(relays.size()));
        NormalStream rel(mix_seed(seed, 2));
        for (int k : relay_targets(config)) {
            for (int j = 0; j < static_cast<int>(relays.size()); ++j) {
                set.relay(k - 1, j) = rel.complex_normal(config.relay_variance);
            }
        }
    }
    return set;
}

ChannelSet sample_channels(const core::SystemConfig& config, std::uint64_t seed) {
    return sample_channels(config, seed, config.strategy == core::Strategy::Crsma);
}

ChannelEnsemble make_ensemble(const core::SystemConfig& config, std::uint64_t base_seed,
                              int count, bool with_relay) {
    if (count < 1) throw std::invalid_argument("make_ensemble: count must be >= 1");
    ChannelEnsemble e;
    e.base_seed = base_seed;
    e.fingerprint = config_fingerprint(config);
    e.has_relay = with_relay;
    e.realizations.reserve(count);
    for (int i = 0; i < count; ++i) {
        e.realizations.push_back(sample_channels(config, mix_seed(base_seed, i), with_relay));
    }
    return e;
}

namespace {

constexpr char kMagic[8] = {'R', 'S', 'F', 'B', 'L', 'C', 'H', '1'};

json header_json(const ChannelEnsemble& e) {
    const auto& first = e.realizations.front();
    json h;
    h["generator"] = e.generator;
    h["base_seed"] = e.base_seed;
    h["fingerprint"] = e.fingerprint;
    h["count"] = e.realizations.size();
    h["n_tx"] = first.downlink.rows();
    h["k"] = first.downlink.cols();
    h["relay_cols"] = first.relay.cols();
    h["variances"] = first.variances;
    h["relay_variance"] = first.relay_variance;
    json seeds = json::array();
    for (const auto& r : e.realizations) seeds.push_back(r.seed);
    h["seeds"] = seeds;
    return h;
}

void apply_header(const json& h, ChannelEnsemble& e) {
    e.generator = h.at("generator").get<std::string>();
    e.base_seed = h.at("base_seed").get<std::uint64_t>();
    e.fingerprint = h.at("fingerprint").get<std::uint64_t>();
    e.has_relay = h.at("relay_cols").get<int>() > 0;
}

bool is_json_path(const std::string& path) {
    return path.size() >= 5 && path.substr(path.size() - 5) == ".json";
}

void write_doubles(std::ostream& out, const Eigen::MatrixXcd& m) {
    for (int c = 0; c < m.cols(); ++c) {
        for (int r = 0; r < m.rows(); ++r) {
            double re = m(r, c).real(), im = m(r, c).imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof(double));
            out.write(reinterpret_cast<const char*>(&im), sizeof(double));
        }
    }
}

void read_doubles(std::istream& in, Eigen::MatrixXcd& m) {
    for (int c = 0; c < m.cols(); ++c) {
        for (int r = 0; r < m.rows(); ++r) {
            double re = 0, im = 0;
            in.read(reinterpret_cast<char*>(&re), sizeof(double));
            in.read(reinterpret_cast<char*>(&im), sizeof(double));
            m(r, c) = {re, im};
        }
    }
}

std::uint64_t bits(double x) {
    std::uint64_t u;
    std::memcpy(&u, &x, sizeof(u));
    return u;
}

double from_bits(std::uint64_t u) {
    double x;
    std::memcpy(&x, &u, sizeof(x));
    return x;
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
    // bit patterns, so the text format is exact too
    json cols = json::array();
    for (int c = 0; c < m.cols(); ++c) {
        json col = json::array();
        for (int r = 0; r < m.rows(); ++r) {
            col.push_back({bits(m(r, c).real()), bits(m(r, c).imag())});
        }
        cols.push_back(col);
    }
    return cols;
}

Eigen::MatrixXcd matrix_from_json(const json& cols, int rows, int ncols) {
    Eigen::MatrixXcd m(rows, ncols);
    for (int c = 0; c < ncols; ++c) {
        for (int r = 0; r < rows; ++r) {
            const auto& e = cols.at(c).at(r);
            m(r, c) = {from_bits(e.at(0).get<std::uint64_t>()),
                       from_bits(e.at(1).get<std::uint64_t>())};
        }
    }
    return m;
}

}  // namespace

void save_ensemble(const ChannelEnsemble& ensemble, const std::string& path) {
    if (ensemble.realizations.empty()) {
        throw std::invalid_argument("save_ensemble: empty ensemble");
    }
    if (is_json_path(path)) {
        json doc;
        doc["header"] = header_json(ensemble);
        json reals = json::array();
        for (const auto& r : ensemble.realizations) {
            json jr;
            jr["seed"] = r.seed;
            jr["downlink"] = matrix_to_json(r.downlink);
            jr["relay"] = matrix_to_json(r.relay);
            reals.push_back(jr);
        }
        doc["realizations"] = reals;
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << doc.dump() << "\n";
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(kMagic, sizeof(kMagic));
    std::string header = header_json(ensemble).dump();
    std::uint32_t len = static_cast<std::uint32_t>(header.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(header.data(), header.size());
    for (const auto& r : ensemble.realizations) {
        write_doubles(out, r.downlink);
        write_doubles(out, r.relay);
    }
}

ChannelEnsemble load_ensemble(const std::string& path) {
    ChannelEnsemble e;
    json header;
    if (is_json_path(path)) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        json doc = json::parse(in, nullptr, true);
        header = doc.at("header");
        apply_header(header, e);
        int n_tx = header.at("n_tx").get<int>();
        int k = header.at("k").get<int>();
        int relay_cols = header.at("relay_cols").get<int>();
        for (const auto& jr : doc.at("realizations")) {
            ChannelSet s;
            s.seed = jr.at("seed").get<std::uint64_t>();
            s.downlink = matrix_from_json(jr.at("downlink"), n_tx, k);
            s.relay = relay_cols > 0 ? matrix_from_json(jr.at("relay"), k, relay_cols)
                                     : Eigen::MatrixXcd();
            s.variances = header.at("variances").get<std::vector<double>>();
            s.relay_variance = header.at("relay_variance").get<double>();
            e.realizations.push_back(std::move(s));
        }
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + path);
        char magic[8];
        in.read(magic, sizeof(magic));
        if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
            throw std::runtime_error("malformed channel file (bad magic): " + path);
        }
        std::uint32_t len = 0;
        in.read(reinterpret_cast<char*>(&len), sizeof(len));
        std::string htext(len, '\0');
        in.read(htext.data(), len);
        if (!in) throw std::runtime_error("malformed channel file (truncated header)");
        header = json::parse(htext);
        apply_header(header, e);
        int n_tx = header.at("n_tx").get<int>();
        int k = header.at("k").get<int>();
        int relay_cols = header.at("relay_cols").get<int>();
        std::size_t count = header.at("count").get<std::size_t>();
        auto seeds = header.at("seeds").get<std::vector<std::uint64_t>>();
        for (std::size_t i = 0; i < count; ++i) {
            ChannelSet s;
            s.seed = seeds.at(i);
            s.downlink.resize(n_tx, k);
            read_doubles(in, s.downlink);
            if (relay_cols > 0) {
                s.relay.resize(k, relay_cols);
                read_doubles(in, s.relay);
            }
            s.variances = header.at("variances").get<std::vector<double>>();
            s.relay_variance = header.at("relay_variance").get<double>();
            if (!in) throw std::runtime_error("malformed channel file (truncated payload)");
            e.realizations.push_back(std::move(s));
        }
    }
    if (e.realizations.empty()) throw std::runtime_error("channel file holds no realizations");
    return e;
}

ChannelEnsemble load_ensemble(const std::string& path, const core::SystemConfig& config) {
    ChannelEnsemble e = load_ensemble(path);
    const auto& first = e.realizations.front();
    if (first.downlink.rows() != config.n_tx ||
        first.downlink.cols() != config.num_users()) {
        throw std::runtime_error("channel file dimensions do not match the config");
    }
    if (e.fingerprint != config_fingerprint(config)) {
        throw std::runtime_error("channel file fingerprint does not match the config");
    }
    return e;
}

}  // namespace rsfbl::chan
