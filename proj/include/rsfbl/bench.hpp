#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rsfbl/config.hpp"
#include "rsfbl/solution.hpp"

namespace rsfbl::bench {

inline constexpr const char* kToolVersion = "rsfbl 0.1.0";

/// One Monte-Carlo sweep: seeds x strategies x modes x blocklengths over a
/// shared base configuration.
struct ExperimentSpec {
    std::string name = "custom";
    core::SystemConfig base;  // l_total and strategy are overridden per cell
    std::vector<core::Strategy> strategies;
    std::vector<core::BlocklengthMode> modes;
    bool include_inf_fin = false;  // re-evaluate the infinite design under FBL
    std::vector<long> blocklengths;
    int num_seeds = 10;
    std::uint64_t base_seed = 1;
    /// Off by default so repeated runs emit byte-identical files; wall times
    /// are recorded as 0 unless enabled.
    bool measure_timings = false;
};

std::vector<std::string> validate(const ExperimentSpec& spec);

struct Record {
    std::uint64_t seed = 0;
    std::string strategy;
    std::string mode;  // "fin", "inf", "inf-fin"
    long l_n = 0;
    double mmf = 0.0;
    double theta = 1.0;
    double common_power_fraction = 0.0;
    int iters = 0;
    double wall_ms = 0.0;
    bool failed = false;
    std::string error;
};

struct Aggregate {
    std::string strategy;
    std::string mode;
    long l_n = 0;
    int count = 0;  // successful records entering the means
    double mean_mmf = 0.0;
    double stderr_mmf = 0.0;
    double mean_theta = 0.0;
    double mean_common_power_fraction = 0.0;
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<Record> records;
    std::vector<Aggregate> aggregates;

    int failures() const;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// (mean_A - mean_B) / mean_B over the aggregate cells of one mode.
double relative_gain(const ExperimentResult& result, const std::string& strategy_a,
                     const std::string& strategy_b, long l_n,
                     const std::string& mode = "fin");

/// Fraction of transmit power carried by the common stream.
double common_power_fraction(const core::Solution& solution);

/// Recomputes `aggregates` from `records`; run_experiment calls this itself.
std::vector<Aggregate> aggregate_records(const std::vector<Record>& records);

/// Writes records.csv, aggregates.csv, result.json, and manifest.json into
/// `dir` (created if missing). Returns the record CSV path.
std::string emit(const ExperimentResult& result, const std::string& dir);

std::string result_to_json(const ExperimentResult& result);
ExperimentResult result_from_json(const std::string& text);

std::string spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const std::string& text);

/// Desk-scale figure presets; unknown names throw.
ExperimentSpec preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace rsfbl::bench
