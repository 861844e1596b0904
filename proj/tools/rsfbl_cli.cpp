// Command-line front end: validate configs, sample channel ensembles, solve
// single instances, run Monte-Carlo sweeps, and report relative gains.
//
// Exit codes: 0 success, 1 validation or usage error, 2 sweep completed with
// partial failures.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "rsfbl/bench.hpp"
#include "rsfbl/channel.hpp"
#include "rsfbl/config.hpp"
#include "rsfbl/strategies.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rsfbl;

namespace {

constexpr int kOk = 0;
constexpr int kValidationError = 1;
constexpr int kPartialFailure = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// A sweep comes from either a preset name or a spec JSON file, after which
/// individual fields may be overridden from the command line.
struct SweepArgs {
    std::string preset;
    std::string spec_path;
    std::string out_dir;
    std::optional<int> seeds;
    std::optional<std::uint64_t> base_seed;
    std::vector<long> blocklengths;
    bool timings = false;
};

bench::ExperimentSpec resolve_spec(const SweepArgs& args) {
    if (args.preset.empty() == args.spec_path.empty()) {
        throw std::runtime_error("pass exactly one of --preset and --spec");
    }
    bench::ExperimentSpec spec = args.preset.empty()
                                     ? bench::spec_from_json(slurp(args.spec_path))
                                     : bench::preset(args.preset);
    if (args.seeds) spec.num_seeds = *args.seeds;
    if (args.base_seed) spec.base_seed = *args.base_seed;
    if (!args.blocklengths.empty()) spec.blocklengths = args.blocklengths;
    spec.measure_timings = args.timings;
    return spec;
}

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
}

/// Every command that produces an artifact drops a manifest next to it.
void write_manifest(const fs::path& dir, const json& extra) {
    json manifest = extra;
    manifest["tool"] = bench::kToolVersion;
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

int cmd_validate(const std::string& config_path, const std::string& spec_path,
                 const std::string& preset_name) {
    std::vector<std::string> errors;
    if (!config_path.empty()) {
        errors = core::validate(core::load_config(config_path));
    } else if (!spec_path.empty()) {
        errors = bench::validate(bench::spec_from_json(slurp(spec_path)));
    } else if (!preset_name.empty()) {
        errors = bench::validate(bench::preset(preset_name));
    } else {
        std::cerr << "validate: pass one of --config, --spec, --preset\n";
        return kValidationError;
    }
    for (const auto& e : errors) std::cout << "error: " << e << "\n";
    if (errors.empty()) std::cout << "ok\n";
    return errors.empty() ? kOk : kValidationError;
}

int cmd_sample_channels(const std::string& config_path, std::uint64_t seed, int count,
                        bool with_relay, const std::string& out_path) {
    auto config = core::load_config(config_path);
    if (auto errors = core::validate(config); !errors.empty()) {
        for (const auto& e : errors) std::cerr << "error: " << e << "\n";
        return kValidationError;
    }
    auto ensemble = chan::make_ensemble(config, seed, count, with_relay);
    chan::save_ensemble(ensemble, out_path);

    json info;
    info["command"] = "sample-channels";
    info["config"] = json::parse(core::to_json(config));
    info["base_seed"] = seed;
    info["count"] = count;
    info["generator"] = ensemble.generator;
    info["output"] = fs::path(out_path).filename().string();
    write_manifest(fs::path(out_path).parent_path(), info);
    std::cout << "wrote " << count << " realizations to " << out_path << "\n";
    return kOk;
}

int cmd_solve(const std::string& config_path, std::uint64_t seed,
              const std::string& channels_path, int index, const std::string& out_path) {
    auto config = core::load_config(config_path);
    if (auto errors = core::validate(config); !errors.empty()) {
        for (const auto& e : errors) std::cerr << "error: " << e << "\n";
        return kValidationError;
    }
    chan::ChannelSet channels;
    if (!channels_path.empty()) {
        auto ensemble = chan::load_ensemble(channels_path, config);
        if (index < 0 || index >= static_cast<int>(ensemble.realizations.size())) {
            std::cerr << "error: realization index " << index << " out of range\n";
            return kValidationError;
        }
        channels = ensemble.realizations[index];
    } else {
        channels = chan::sample_channels(config, seed);
    }

    auto run = strat::solve(channels, config);
    json out;
    out["strategy"] = run.strategy;
    out["mode"] = run.mode;
    out["solution"] = json::parse(core::solution_to_json(run.solution));
    if (!run.candidates.empty()) {
        out["candidates"] = json::array();
        for (const auto& [l_c, obj] : run.candidates) {
            out["candidates"].push_back({{"l_c", l_c}, {"objective", obj}});
        }
    }
    const std::string body = out.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << body;
    } else {
        write_text(out_path, body);
        json info;
        info["command"] = "solve";
        info["config"] = json::parse(core::to_json(config));
        info["seed"] = seed;
        if (!channels_path.empty()) {
            info["channels"] = channels_path;
            info["index"] = index;
        }
        info["output"] = fs::path(out_path).filename().string();
        write_manifest(fs::path(out_path).parent_path(), info);
    }
    return kOk;
}

int cmd_sweep(const SweepArgs& args) {
    if (args.out_dir.empty()) {
        std::cerr << "error: --out is required\n";
        return kValidationError;
    }
    auto spec = resolve_spec(args);
    if (auto errors = bench::validate(spec); !errors.empty()) {
        for (const auto& e : errors) std::cerr << "error: " << e << "\n";
        return kValidationError;
    }
    auto result = bench::run_experiment(spec);
    auto records_path = bench::emit(result, args.out_dir);
    std::cout << "wrote " << result.records.size() << " records to " << records_path
              << "\n";
    if (result.failures() > 0) {
        std::cerr << result.failures() << " of " << result.records.size()
                  << " cells failed; see result.json for messages\n";
        return kPartialFailure;
    }
    return kOk;
}

int cmd_gains(const std::string& result_path, const std::string& a, const std::string& b,
              long l_n, const std::string& mode) {
    fs::path path = result_path;
    if (fs::is_directory(path)) path /= "result.json";
    auto result = bench::result_from_json(slurp(path.string()));
    double gain = bench::relative_gain(result, a, b, l_n, mode);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", gain);
    std::cout << a << " vs " << b << " at l_n=" << l_n << " (" << mode << "): " << buf
              << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Max-min-fair rate-splitting designs under finite-blocklength penalties"};
    app.require_subcommand(1);
    app.set_version_flag("--version", bench::kToolVersion);

    std::string config_path, spec_path, preset_name, out_path, channels_path;
    std::uint64_t seed = 1;
    int count = 1, index = 0;
    bool with_relay = false;
    SweepArgs sweep;
    std::string gain_a = "RSMA", gain_b = "SDMA", gain_mode = "fin";
    long gain_l = 0;

    auto* validate = app.add_subcommand("validate", "Check a config, spec, or preset");
    validate->add_option("--config", config_path, "System config JSON file");
    validate->add_option("--spec", spec_path, "Experiment spec JSON file");
    validate->add_option("--preset", preset_name, "Preset name");

    auto* sample = app.add_subcommand("sample-channels", "Draw a channel ensemble");
    sample->add_option("--config", config_path, "System config JSON file")->required();
    sample->add_option("--seed", seed, "Base seed (default 1)");
    sample->add_option("--count", count, "Number of realizations (default 1)");
    sample->add_flag("--with-relay", with_relay, "Also draw inter-user relay links");
    sample->add_option("--out", out_path, "Output file (.json for text, else binary)")
        ->required();

    auto* solve = app.add_subcommand("solve", "Solve one instance");
    solve->add_option("--config", config_path, "System config JSON file")->required();
    solve->add_option("--seed", seed, "Channel seed when sampling fresh (default 1)");
    solve->add_option("--channels", channels_path, "Ensemble file to load instead");
    solve->add_option("--index", index, "Realization index within the ensemble");
    solve->add_option("--out", out_path, "Write the solution JSON here (default stdout)");

    auto* sw = app.add_subcommand("sweep", "Run a Monte-Carlo experiment");
    sw->add_option("--preset", sweep.preset, "Preset name (see `sweep --list`)");
    sw->add_option("--spec", sweep.spec_path, "Experiment spec JSON file");
    sw->add_option("--out", sweep.out_dir, "Output directory");
    sw->add_option("--seeds", sweep.seeds, "Override the seed count");
    sw->add_option("--base-seed", sweep.base_seed, "Override the base seed");
    sw->add_option("--blocklengths", sweep.blocklengths, "Override the sweep points");
    sw->add_flag("--timings", sweep.timings,
                 "Record wall times (makes outputs run-dependent)");
    bool list_presets = false;
    sw->add_flag("--list", list_presets, "List preset names and exit");

    auto* gains = app.add_subcommand("gains", "Relative MMF gain between two strategies");
    std::string result_path;
    gains->add_option("--result", result_path, "result.json file or sweep directory")
        ->required();
    gains->add_option("--a", gain_a, "Numerator strategy tag (default RSMA)");
    gains->add_option("--b", gain_b, "Baseline strategy tag (default SDMA)");
    gains->add_option("--l", gain_l, "Blocklength of the cell")->required();
    gains->add_option("--mode", gain_mode, "fin, inf, or inf-fin (default fin)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(validate)) {
            return cmd_validate(config_path, spec_path, preset_name);
        }
        if (app.got_subcommand(sample)) {
            return cmd_sample_channels(config_path, seed, count, with_relay, out_path);
        }
        if (app.got_subcommand(solve)) {
            return cmd_solve(config_path, seed, channels_path, index, out_path);
        }
        if (app.got_subcommand(sw)) {
            if (list_presets) {
                for (const auto& n : bench::preset_names()) std::cout << n << "\n";
                return kOk;
            }
            return cmd_sweep(sweep);
        }
        if (app.got_subcommand(gains)) {
            return cmd_gains(result_path, gain_a, gain_b, gain_l, gain_mode);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    }
    return kOk;
}
