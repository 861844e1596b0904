#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace rsfbl::core {

/// Result of one solve: precoders, common-rate split, time allocation and
/// the achieved per-group rates. Column 0 of `precoders` is the common
/// stream (all-zero under SDMA), columns 1..M the group streams.
struct Solution {
    Eigen::MatrixXcd precoders;     // n_tx x (M+1)
    Eigen::VectorXd common_split;   // C_m, nonnegative
    long l_d = 0;
    long l_c = 0;
    double theta = 1.0;             // l_d / l_n
    Eigen::VectorXd group_rates;    // R_m, bits per channel use
    double common_rate = 0.0;       // achieved R_c
    double mmf = 0.0;               // max(min_m R_m, 0)
    double objective = 0.0;         // final SCA objective t*
    int iterations = 0;
    bool converged = true;          // false when the iteration cap was hit
    std::vector<double> objective_trace;

    double total_power() const { return precoders.squaredNorm(); }
};

std::string solution_to_json(const Solution& s);
Solution solution_from_json(const std::string& text);

}  // namespace rsfbl::core
