#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "rsfbl/channel.hpp"
#include "rsfbl/config.hpp"
#include "rsfbl/conic.hpp"
#include "rsfbl/solution.hpp"

namespace rsfbl::sca {

/// Per-user SINRs of one precoder candidate. `relay_common` is the
/// cooperative-phase SINR (zero for relay-group users and non-cooperative
/// runs); it does not depend on the precoders.
struct SinrTable {
    Eigen::VectorXd common;        // per user
    Eigen::VectorXd priv;          // per user
    Eigen::VectorXd relay_common;  // per user
};

/// Current SCA linearization point.
struct ScaState {
    int iterate = 0;
    Eigen::MatrixXcd precoders;  // n_tx x (M+1); column 0 is the common stream
    Eigen::VectorXd rho_common;  // per user, > 0
    Eigen::VectorXd rho_private; // per user, > 0
    double objective = 0.0;
};

SinrTable evaluate_sinrs(const chan::ChannelSet& channels,
                         const Eigen::MatrixXcd& precoders,
                         const core::SystemConfig& config);

struct RateBreakdown {
    double common_rate = 0.0;       // R_c after min-combining
    Eigen::VectorXd group_rates;    // C_m + min private rate of group m
    double mmf = 0.0;               // clamped at 0
    bool split_feasible = true;     // sum C_m <= R_c + 1e-9
};

/// Achieved rates of a candidate (P, c, theta). Per-stream rates are clamped
/// at zero before combining; theta = 1 ignores the relay table entirely.
RateBreakdown achieved_rates(const chan::ChannelSet& channels,
                             const core::SystemConfig& config,
                             const Eigen::MatrixXcd& precoders,
                             const Eigen::VectorXd& common_split, long l_d, long l_c);

/// Tangent of the dispersion penalty (B / sqrt(l)) * sqrt(1 - (1+rho)^-2)
/// at rho_n: penalty ~ intercept + slope * rho. Majorizes the penalty for
/// every rho > 0 (the sqrt term is concave).
struct TaylorCoeffs {
    double intercept = 0.0;
    double slope = 0.0;
    double at(double rho) const { return intercept + slope * rho; }
};
TaylorCoeffs taylor_sqrt_dispersion(double rho_n, long blocklength, double penalty_b);

/// Tangent minorant of the quadratic-over-linear term |h^H p|^2 / rho at
/// (p_n, rho_n): bound(p, rho) = p_coeffs . x(p) + rho_coeff * rho, where
/// x(p) stacks Re(p) then Im(p).
struct QolLinearization {
    Eigen::VectorXd p_coeffs;  // length 2 * n_tx
    double rho_coeff = 0.0;
    double at(const Eigen::VectorXcd& p, double rho) const;
};
QolLinearization linearize_qol(const Eigen::VectorXcd& h, const Eigen::VectorXcd& p_n,
                               double rho_n);

/// Variable layout of the assembled subproblem, for extraction and
/// warm-start checks.
struct SubproblemLayout {
    int n_tx = 0, num_groups = 0, num_users = 0;
    bool has_common = true;  // false under SDMA
    int num_streams() const { return num_groups + (has_common ? 1 : 0); }
    int t() const { return 0; }
    int p(int stream, int coord) const { return 1 + stream * 2 * n_tx + coord; }
    int c(int m) const { return 1 + num_streams() * 2 * n_tx + m; }
    int alpha_c(int k) const { return c(0) + (has_common ? num_groups : 0) + k; }
    int alpha_p(int m) const { return alpha_c(0) + (has_common ? num_users : 0) + m; }
    int rho_c(int k) const { return alpha_p(0) + num_groups + k; }
    int rho_p(int k) const { return rho_c(0) + (has_common ? num_users : 0) + k; }
    int total() const { return rho_p(0) + num_users; }
};

/// Assembles the convex restriction at `state` for fixed (l_d, l_c).
/// `relay_rates` holds the constant cooperative common rate per user
/// (ignored when l_c = 0).
conic::ConicProgram build_subproblem(const chan::ChannelSet& channels,
                                     const core::SystemConfig& config,
                                     const ScaState& state, long l_d, long l_c,
                                     const Eigen::VectorXd& relay_rates,
                                     SubproblemLayout* layout_out = nullptr);

struct ScaOptions {
    int max_iterations = 200;
    /// Called before each conic solve from iteration 2 on, with the program
    /// about to be solved and the previous optimal point.
    std::function<void(const conic::ConicProgram&, const Eigen::VectorXd& warm_x)>
        on_iteration;
};

/// Inner SCA loop: iterate build_subproblem + conic solve until
/// |t_n - t_{n-1}| < config.sca_tolerance or the iteration cap.
core::Solution sca_solve(const chan::ChannelSet& channels, const core::SystemConfig& config,
                         long l_d, long l_c, const ScaState& init,
                         const ScaOptions& options = {});

/// MRT/SVD start: dominant singular directions per group, half the power on
/// the common stream (none under SDMA), remainder split equally.
ScaState initialize_precoders(const chan::ChannelSet& channels,
                              const core::SystemConfig& config);

/// Constant cooperative-phase common rates entering the subproblem, clamped
/// at zero (zero vector for l_c = 0).
Eigen::VectorXd relay_common_rates(const chan::ChannelSet& channels,
                                   const core::SystemConfig& config, long l_c,
                                   double theta);

}  // namespace rsfbl::sca
