#include "rsfbl/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rsfbl/channel.hpp"
#include "rsfbl/strategies.hpp"

namespace rsfbl::bench {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string mode_tag(core::BlocklengthMode m) {
    return m == core::BlocklengthMode::Finite ? "fin" : "inf";
}

Record make_record(std::uint64_t seed, const strat::StrategyRun& run, long l_n,
                   double wall_ms) {
    Record r;
    r.seed = seed;
    r.strategy = run.strategy;
    r.mode = run.mode;
    r.l_n = l_n;
    r.mmf = run.solution.mmf;
    r.theta = run.solution.theta;
    r.common_power_fraction = common_power_fraction(run.solution);
    r.iters = run.solution.iterations;
    r.wall_ms = wall_ms;
    return r;
}

json record_to_json(const Record& r) {
    json j;
    j["seed"] = r.seed;
    j["strategy"] = r.strategy;
    j["mode"] = r.mode;
    j["l_n"] = r.l_n;
    j["mmf"] = r.mmf;
    j["theta"] = r.theta;
    j["common_power_fraction"] = r.common_power_fraction;
    j["iters"] = r.iters;
    j["wall_ms"] = r.wall_ms;
    j["failed"] = r.failed;
    if (r.failed) j["error"] = r.error;
    return j;
}

// NaN serializes as JSON null; map it back on the way in.
double number_or_nan(const json& j, const char* key) {
    const json& v = j.at(key);
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

Record record_from_json(const json& j) {
    Record r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.strategy = j.at("strategy").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.l_n = j.at("l_n").get<long>();
    r.mmf = number_or_nan(j, "mmf");
    r.theta = number_or_nan(j, "theta");
    r.common_power_fraction = number_or_nan(j, "common_power_fraction");
    r.iters = j.at("iters").get<int>();
    r.wall_ms = j.at("wall_ms").get<double>();
    r.failed = j.value("failed", false);
    r.error = j.value("error", std::string());
    return r;
}

}  // namespace

std::vector<std::string> validate(const ExperimentSpec& spec) {
    std::vector<std::string> errors;
    if (spec.blocklengths.empty()) errors.push_back("blocklength sweep must be nonempty");
    for (long l : spec.blocklengths) {
        if (l < 1) errors.push_back("blocklengths must be positive");
    }
    if (spec.num_seeds < 1) errors.push_back("seed count must be >= 1");
    if (spec.strategies.empty()) errors.push_back("strategy list must be nonempty");
    if (spec.modes.empty() && !spec.include_inf_fin) {
        errors.push_back("at least one blocklength mode is required");
    }
    core::SystemConfig probe = spec.base;
    for (auto s : spec.strategies) {
        probe.strategy = s;
        for (long l : spec.blocklengths) {
            probe.l_total = l;
            for (const auto& e : core::validate(probe)) {
                errors.push_back(core::to_string(s) + " at l_n=" + std::to_string(l) +
                                 ": " + e);
            }
        }
    }
    return errors;
}

int ExperimentResult::failures() const {
    int n = 0;
    for (const auto& r : records) n += r.failed ? 1 : 0;
    return n;
}

double common_power_fraction(const core::Solution& solution) {
    double total = solution.precoders.squaredNorm();
    if (total <= 0.0) throw std::invalid_argument("common_power_fraction: zero power");
    return solution.precoders.col(0).squaredNorm() / total;
}

std::vector<Aggregate> aggregate_records(const std::vector<Record>& records) {
    // Stable cell order: first appearance in the record list.
    std::vector<Aggregate> cells;
    auto cell_of = [&](const Record& r) -> Aggregate& {
        for (auto& c : cells) {
            if (c.strategy == r.strategy && c.mode == r.mode && c.l_n == r.l_n) return c;
        }
        cells.push_back({r.strategy, r.mode, r.l_n, 0, 0.0, 0.0, 0.0, 0.0});
        return cells.back();
    };
    for (const auto& r : records) {
        Aggregate& c = cell_of(r);
        if (r.failed) continue;
        ++c.count;
        c.mean_mmf += r.mmf;
        c.mean_theta += r.theta;
        c.mean_common_power_fraction += r.common_power_fraction;
    }
    for (auto& c : cells) {
        if (c.count == 0) continue;
        c.mean_mmf /= c.count;
        c.mean_theta /= c.count;
        c.mean_common_power_fraction /= c.count;
    }
    for (auto& c : cells) {
        if (c.count < 2) continue;
        double ss = 0.0;
        for (const auto& r : records) {
            if (r.failed || c.strategy != r.strategy || c.mode != r.mode || c.l_n != r.l_n)
                continue;
            double d = r.mmf - c.mean_mmf;
            ss += d * d;
        }
        c.stderr_mmf = std::sqrt(ss / (c.count - 1)) / std::sqrt(double(c.count));
    }
    return cells;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    {
        auto errors = validate(spec);
        if (!errors.empty()) {
            throw std::invalid_argument("invalid experiment spec: " + errors.front());
        }
    }
    const bool wants_crsma =
        std::find(spec.strategies.begin(), spec.strategies.end(),
                  core::Strategy::Crsma) != spec.strategies.end();

    ExperimentResult result;
    result.spec = spec;

    for (int i = 0; i < spec.num_seeds; ++i) {
        const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(i);
        // Every strategy at this seed sees the same channel realization.
        core::SystemConfig sampling = spec.base;
        sampling.strategy = wants_crsma ? core::Strategy::Crsma : core::Strategy::Rsma;
        sampling.l_total = spec.blocklengths.front();
        if (wants_crsma) sampling.l_total = std::max(sampling.l_total, 2 * sampling.lc_grid.start);
        auto channels = chan::sample_channels(sampling, seed);

        for (long l_n : spec.blocklengths) {
            for (auto strategy : spec.strategies) {
                core::SystemConfig cfg = spec.base;
                cfg.strategy = strategy;
                cfg.l_total = l_n;

                core::Solution inf_design;
                bool have_inf = false;
                auto run_one = [&](core::BlocklengthMode mode,
                                   bool cross) -> strat::StrategyRun {
                    core::SystemConfig c = cfg;
                    c.blocklength_mode = mode;
                    if (!cross) return strat::solve(channels, c);
                    if (!have_inf) {
                        core::SystemConfig ci = cfg;
                        ci.blocklength_mode = core::BlocklengthMode::Infinite;
                        inf_design = strat::solve(channels, ci).solution;
                        have_inf = true;
                    }
                    return strat::evaluate_inf_fin(channels, c, inf_design);
                };

                auto execute = [&](core::BlocklengthMode mode, bool cross,
                                   const std::string& tag) {
                    auto t0 = std::chrono::steady_clock::now();
                    try {
                        auto run = run_one(mode, cross);
                        double ms = 0.0;
                        if (spec.measure_timings) {
                            ms = std::chrono::duration<double, std::milli>(
                                     std::chrono::steady_clock::now() - t0)
                                     .count();
                        }
                        if (mode == core::BlocklengthMode::Infinite && !cross) {
                            have_inf = true;
                            inf_design = run.solution;
                        }
                        result.records.push_back(make_record(seed, run, l_n, ms));
                    } catch (const std::exception& e) {
                        Record r;
                        r.seed = seed;
                        r.strategy = core::to_string(strategy);
                        r.mode = tag;
                        r.l_n = l_n;
                        r.mmf = std::numeric_limits<double>::quiet_NaN();
                        r.theta = std::numeric_limits<double>::quiet_NaN();
                        r.common_power_fraction = std::numeric_limits<double>::quiet_NaN();
                        r.failed = true;
                        r.error = e.what();
                        result.records.push_back(r);
                    }
                };

                // Solve "inf" before "fin" so an explicit infinite run is
                // reused by the inf-fin cross-evaluation.
                std::vector<core::BlocklengthMode> modes = spec.modes;
                std::stable_sort(modes.begin(), modes.end(),
                                 [](core::BlocklengthMode a, core::BlocklengthMode b) {
                                     return a == core::BlocklengthMode::Infinite &&
                                            b == core::BlocklengthMode::Finite;
                                 });
                for (auto mode : modes) execute(mode, false, mode_tag(mode));
                if (spec.include_inf_fin) {
                    execute(core::BlocklengthMode::Finite, true, "inf-fin");
                }
            }
        }
    }
    result.aggregates = aggregate_records(result.records);
    return result;
}

double relative_gain(const ExperimentResult& result, const std::string& strategy_a,
                     const std::string& strategy_b, long l_n, const std::string& mode) {
    const Aggregate* a = nullptr;
    const Aggregate* b = nullptr;
    for (const auto& c : result.aggregates) {
        if (c.mode != mode || c.l_n != l_n || c.count == 0) continue;
        if (c.strategy == strategy_a) a = &c;
        if (c.strategy == strategy_b) b = &c;
    }
    if (!a || !b) throw std::invalid_argument("relative_gain: missing aggregate cell");
    if (b->mean_mmf == 0.0) throw std::domain_error("relative_gain: zero baseline");
    return (a->mean_mmf - b->mean_mmf) / b->mean_mmf;
}

std::string spec_to_json(const ExperimentSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["base"] = json::parse(core::to_json(spec.base));
    j["strategies"] = json::array();
    for (auto s : spec.strategies) j["strategies"].push_back(core::to_string(s));
    j["modes"] = json::array();
    for (auto m : spec.modes) j["modes"].push_back(core::to_string(m));
    j["include_inf_fin"] = spec.include_inf_fin;
    j["blocklengths"] = spec.blocklengths;
    j["num_seeds"] = spec.num_seeds;
    j["base_seed"] = spec.base_seed;
    j["measure_timings"] = spec.measure_timings;
    return j.dump(2);
}

ExperimentSpec spec_from_json(const std::string& text) {
    json j = json::parse(text);
    ExperimentSpec spec;
    spec.name = j.value("name", std::string("custom"));
    spec.base = core::config_from_json(j.at("base").dump());
    for (const auto& s : j.at("strategies")) {
        spec.strategies.push_back(core::strategy_from_string(s.get<std::string>()));
    }
    for (const auto& m : j.value("modes", json::array())) {
        spec.modes.push_back(core::mode_from_string(m.get<std::string>()));
    }
    spec.include_inf_fin = j.value("include_inf_fin", false);
    spec.blocklengths = j.at("blocklengths").get<std::vector<long>>();
    spec.num_seeds = j.at("num_seeds").get<int>();
    spec.base_seed = j.at("base_seed").get<std::uint64_t>();
    spec.measure_timings = j.value("measure_timings", false);
    return spec;
}

std::string result_to_json(const ExperimentResult& result) {
    json j;
    j["spec"] = json::parse(spec_to_json(result.spec));
    j["records"] = json::array();
    for (const auto& r : result.records) j["records"].push_back(record_to_json(r));
    j["aggregates"] = json::array();
    for (const auto& a : result.aggregates) {
        json c;
        c["strategy"] = a.strategy;
        c["mode"] = a.mode;
        c["l_n"] = a.l_n;
        c["count"] = a.count;
        c["mean_mmf"] = a.mean_mmf;
        c["stderr_mmf"] = a.stderr_mmf;
        c["mean_theta"] = a.mean_theta;
        c["mean_common_power_fraction"] = a.mean_common_power_fraction;
        j["aggregates"].push_back(c);
    }
    return j.dump(2);
}

ExperimentResult result_from_json(const std::string& text) {
    json j = json::parse(text);
    ExperimentResult result;
    result.spec = spec_from_json(j.at("spec").dump());
    for (const auto& r : j.at("records")) result.records.push_back(record_from_json(r));
    for (const auto& c : j.at("aggregates")) {
        Aggregate a;
        a.strategy = c.at("strategy").get<std::string>();
        a.mode = c.at("mode").get<std::string>();
        a.l_n = c.at("l_n").get<long>();
        a.count = c.at("count").get<int>();
        a.mean_mmf = c.at("mean_mmf").get<double>();
        a.stderr_mmf = c.at("stderr_mmf").get<double>();
        a.mean_theta = c.at("mean_theta").get<double>();
        a.mean_common_power_fraction = c.at("mean_common_power_fraction").get<double>();
        result.aggregates.push_back(a);
    }
    return result;
}

std::string emit(const ExperimentResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    const std::string records_path = (fs::path(dir) / "records.csv").string();
    {
        std::ofstream out(records_path);
        if (!out) throw std::runtime_error("emit: cannot write " + records_path);
        out << "seed,strategy,mode,l_n,mmf,theta,common_power_fraction,iters,wall_ms\n";
        for (const auto& r : result.records) {
            out << r.seed << ',' << r.strategy << ',' << r.mode << ',' << r.l_n << ','
                << fmt_double(r.mmf) << ',' << fmt_double(r.theta) << ','
                << fmt_double(r.common_power_fraction) << ',' << r.iters << ','
                << fmt_double(r.wall_ms) << '\n';
        }
    }
    {
        std::ofstream out(fs::path(dir) / "aggregates.csv");
        out << "strategy,mode,l_n,count,mean_mmf,stderr_mmf,mean_theta,"
               "mean_common_power_fraction\n";
        for (const auto& a : result.aggregates) {
            out << a.strategy << ',' << a.mode << ',' << a.l_n << ',' << a.count << ','
                << fmt_double(a.mean_mmf) << ',' << fmt_double(a.stderr_mmf) << ','
                << fmt_double(a.mean_theta) << ','
                << fmt_double(a.mean_common_power_fraction) << '\n';
        }
    }
    {
        std::ofstream out(fs::path(dir) / "result.json");
        out << result_to_json(result) << '\n';
    }
    {
        json manifest;
        manifest["tool"] = kToolVersion;
        manifest["spec"] = json::parse(spec_to_json(result.spec));
        manifest["seeds"] = json::array();
        for (int i = 0; i < result.spec.num_seeds; ++i) {
            manifest["seeds"].push_back(result.spec.base_seed +
                                        static_cast<std::uint64_t>(i));
        }
        std::ofstream out(fs::path(dir) / "manifest.json");
        out << manifest.dump(2) << '\n';
    }
    return records_path;
}

ExperimentSpec preset(const std::string& name) {
    // "<name>-full" runs the same configuration at publication scale.
    constexpr const char* kFullSuffix = "-full";
    const size_t pos = name.rfind(kFullSuffix);
    if (pos != std::string::npos && pos + 5 == name.size() && pos > 0) {
        ExperimentSpec spec = preset(name.substr(0, pos));
        spec.name = name;
        spec.num_seeds = 100;
        return spec;
    }

    ExperimentSpec spec;
    spec.name = name;
    spec.num_seeds = 10;
    spec.base_seed = 1;
    core::SystemConfig& cfg = spec.base;
    cfg.p_tx = 100.0;  // SNR 20 dB over unit noise

    if (name == "fig2a") {
        // Underloaded unicast: two single-user groups, unequal variances.
        cfg.n_tx = 4;
        cfg.groups = {{1}, {2}};
        cfg.channel_variances = {1.0, 0.09};
        spec.strategies = {core::Strategy::Rsma, core::Strategy::Sdma,
                           core::Strategy::Noma};
        spec.modes = {core::BlocklengthMode::Finite, core::BlocklengthMode::Infinite};
        spec.blocklengths = {200, 500, 1000};
        return spec;
    }
    if (name == "fig2c") {
        // Overloaded multicast: two groups of two users, equal variances.
        cfg.n_tx = 2;
        cfg.groups = {{1, 2}, {3, 4}};
        cfg.channel_variances = {1.0, 1.0, 1.0, 1.0};
        spec.strategies = {core::Strategy::Rsma, core::Strategy::Sdma};
        spec.modes = {core::BlocklengthMode::Finite, core::BlocklengthMode::Infinite};
        spec.blocklengths = {200, 500};
        return spec;
    }
    if (name == "fig3b") {
        // Overloaded cooperative: three single-user groups, relay group 1.
        cfg.n_tx = 2;
        cfg.groups = {{1}, {2}, {3}};
        cfg.channel_variances = {1.0, 0.09, 0.01};
        cfg.p_relay = cfg.p_tx;
        spec.strategies = {core::Strategy::Crsma, core::Strategy::Rsma,
                           core::Strategy::Sdma};
        spec.modes = {core::BlocklengthMode::Finite, core::BlocklengthMode::Infinite};
        spec.blocklengths = {300, 500, 2000};
        return spec;
    }
    if (name == "fig4b") {
        // Time allocation of the underloaded cooperative deployment: how the
        // finite-mode direct-phase share approaches the asymptotic one as the
        // blocklength grows.
        cfg.n_tx = 4;
        cfg.groups = {{1}, {2}, {3}};
        cfg.channel_variances = {1.0, 0.09, 0.01};
        cfg.p_relay = cfg.p_tx;
        spec.strategies = {core::Strategy::Crsma};
        spec.modes = {core::BlocklengthMode::Finite, core::BlocklengthMode::Infinite};
        spec.blocklengths = {300, 2000};
        return spec;
    }
    if (name == "fig5") {
        // Cross-evaluation of the infinite-blocklength cooperative design.
        cfg.n_tx = 2;
        cfg.groups = {{1}, {2}, {3}};
        cfg.channel_variances = {1.0, 0.09, 0.01};
        cfg.p_relay = cfg.p_tx;
        spec.strategies = {core::Strategy::Crsma};
        spec.modes = {core::BlocklengthMode::Finite, core::BlocklengthMode::Infinite};
        spec.include_inf_fin = true;
        spec.blocklengths = {300, 500};
        return spec;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
    return {"fig2a", "fig2c", "fig3b", "fig4b", "fig5",
            "fig2a-full", "fig2c-full", "fig3b-full", "fig4b-full", "fig5-full"};
}

}  // namespace rsfbl::bench
