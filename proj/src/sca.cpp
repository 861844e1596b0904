#include "rsfbl/sca.hpp"

#include <cmath>
#include <stdexcept>

#include "rsfbl/fbl.hpp"

namespace rsfbl::sca {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kRhoFloor = 1e-12;
// Fraction of the power budget below which a private stream counts as off.
constexpr double kStreamOffFraction = 1e-10;

std::vector<int> group_lookup(const core::SystemConfig& config) {
    std::vector<int> of(config.num_users(), -1);
    for (int m = 0; m < config.num_groups(); ++m) {
        for (int u : config.groups[m]) of[u - 1] = m;
    }
    return of;
}

bool in_relay_group(const core::SystemConfig& config, int k0) {
    const auto& g1 = config.groups.front();
    return std::find(g1.begin(), g1.end(), k0 + 1) != g1.end();
}

// Real/imag rows of h^H p as linear forms over the stacked [Re p; Im p]
// coordinates of one stream.
void inner_product_rows(const VectorXcd& h, VectorXd& re_row, VectorXd& im_row) {
    const int n = static_cast<int>(h.size());
    re_row.resize(2 * n);
    im_row.resize(2 * n);
    for (int i = 0; i < n; ++i) {
        re_row[i] = h[i].real();
        re_row[n + i] = h[i].imag();
        im_row[i] = -h[i].imag();
        im_row[n + i] = h[i].real();
    }
}

double phase1_fbl(double gamma, const core::SystemConfig& config, long l_d, double theta) {
    fbl::FblParams p{config.effective_bler(), l_d, theta, !config.finite()};
    return std::max(0.0, fbl::fbl_rate(gamma, p));
}

}  // namespace

SinrTable evaluate_sinrs(const chan::ChannelSet& channels, const MatrixXcd& precoders,
                         const core::SystemConfig& config) {
    const int k_total = static_cast<int>(channels.downlink.cols());
    const int m_total = config.num_groups();
    if (precoders.rows() != channels.downlink.rows() || precoders.cols() != m_total + 1) {
        throw std::invalid_argument("evaluate_sinrs: precoder dimensions mismatch");
    }
    auto of = group_lookup(config);
    SinrTable table;
    table.common.resize(k_total);
    table.priv.resize(k_total);
    table.relay_common = VectorXd::Zero(k_total);
    for (int k = 0; k < k_total; ++k) {
        VectorXcd z = channels.downlink.col(k).adjoint() * precoders;  // 1 x (M+1)
        double total_private = 0.0;
        for (int j = 1; j <= m_total; ++j) total_private += std::norm(z[j]);
        table.common[k] = std::norm(z[0]) / (total_private + 1.0);
        double own = std::norm(z[of[k] + 1]);
        table.priv[k] = own / (total_private - own + 1.0);
        if (channels.has_relay() && !in_relay_group(config, k)) {
            for (int j = 0; j < channels.relay.cols(); ++j) {
                table.relay_common[k] += config.p_relay * std::norm(channels.relay(k, j));
            }
        }
    }
    return table;
}

Eigen::VectorXd relay_common_rates(const chan::ChannelSet& channels,
                                   const core::SystemConfig& config, long l_c,
                                   double theta) {
    const int k_total = config.num_users();
    VectorXd rates = VectorXd::Zero(k_total);
    if (l_c <= 0 || !channels.has_relay()) return rates;
    fbl::FblParams params{config.effective_bler(), l_c, 1.0 - theta, !config.finite()};
    for (int k = 0; k < k_total; ++k) {
        if (in_relay_group(config, k)) continue;
        double gamma2 = 0.0;
        for (int j = 0; j < channels.relay.cols(); ++j) {
            gamma2 += config.p_relay * std::norm(channels.relay(k, j));
        }
        rates[k] = std::max(0.0, fbl::fbl_rate(gamma2, params));
    }
    return rates;
}

RateBreakdown achieved_rates(const chan::ChannelSet& channels,
                             const core::SystemConfig& config, const MatrixXcd& precoders,
                             const VectorXd& common_split, long l_d, long l_c) {
    const int k_total = config.num_users();
    const int m_total = config.num_groups();
    const long l_n = l_d + l_c;
    const double theta = static_cast<double>(l_d) / static_cast<double>(l_n);
    if (precoders.squaredNorm() > config.p_tx * (1.0 + 1e-8)) {
        throw std::invalid_argument("achieved_rates: precoders exceed the power budget");
    }
    if (common_split.size() != m_total || (common_split.array() < -1e-12).any()) {
        throw std::invalid_argument("achieved_rates: invalid common-rate split");
    }

    auto of = group_lookup(config);
    SinrTable sinrs = evaluate_sinrs(channels, precoders, config);

    const bool cooperative = l_c > 0 && channels.has_relay();
    VectorXd relay_rates = relay_common_rates(channels, config, l_c, theta);

    RateBreakdown out;
    // Common rate: min over phase-1 users, min-combined with the relay phase.
    double r_c = std::numeric_limits<double>::infinity();
    if (cooperative) {
        double r1 = std::numeric_limits<double>::infinity();
        double r2 = std::numeric_limits<double>::infinity();
        for (int k = 0; k < k_total; ++k) {
            double phase1 = phase1_fbl(sinrs.common[k], config, l_d, theta);
            if (in_relay_group(config, k)) {
                r1 = std::min(r1, phase1);
            } else {
                r2 = std::min(r2, phase1 + relay_rates[k]);
            }
        }
        r_c = std::min(r1, r2);
    } else {
        for (int k = 0; k < k_total; ++k) {
            r_c = std::min(r_c, phase1_fbl(sinrs.common[k], config, l_d, theta));
        }
    }
    out.common_rate = r_c;

    out.group_rates.resize(m_total);
    for (int m = 0; m < m_total; ++m) {
        double priv = std::numeric_limits<double>::infinity();
        for (int k = 0; k < k_total; ++k) {
            if (of[k] != m) continue;
            priv = std::min(priv, phase1_fbl(sinrs.priv[k], config, l_d, theta));
        }
        out.group_rates[m] = common_split[m] + priv;
    }
    out.split_feasible = common_split.sum() <= r_c + 1e-9;
    out.mmf = std::max(0.0, out.group_rates.minCoeff());
    return out;
}

TaylorCoeffs taylor_sqrt_dispersion(double rho_n, long blocklength, double penalty_b) {
    if (!(rho_n > 0.0)) {
        throw std::domain_error("taylor_sqrt_dispersion: rho_n must be > 0");
    }
    if (blocklength < 1) {
        throw std::domain_error("taylor_sqrt_dispersion: blocklength must be >= 1");
    }
    const double scale = penalty_b / std::sqrt(static_cast<double>(blocklength));
    const double g = 1.0 + rho_n;
    const double nu = 1.0 - 1.0 / (g * g);
    TaylorCoeffs t;
    t.slope = scale / (std::sqrt(nu) * g * g * g);
    t.intercept = scale * std::sqrt(nu) - t.slope * rho_n;
    return t;
}

double QolLinearization::at(const VectorXcd& p, double rho) const {
    const int n = static_cast<int>(p.size());
    double v = rho_coeff * rho;
    for (int i = 0; i < n; ++i) {
        v += p_coeffs[i] * p[i].real() + p_coeffs[n + i] * p[i].imag();
    }
    return v;
}

QolLinearization linearize_qol(const VectorXcd& h, const VectorXcd& p_n, double rho_n) {
    if (!(rho_n > 0.0)) throw std::domain_error("linearize_qol: rho_n must be > 0");
    if (h.size() != p_n.size()) throw std::invalid_argument("linearize_qol: size mismatch");
    VectorXd re_row, im_row;
    inner_product_rows(h, re_row, im_row);
    std::complex<double> w = h.adjoint() * p_n;  // h^H p_n
    QolLinearization lin;
    lin.p_coeffs = (2.0 / rho_n) * (w.real() * re_row + w.imag() * im_row);
    lin.rho_coeff = -std::norm(w) / (rho_n * rho_n);
    return lin;
}

conic::ConicProgram build_subproblem(const chan::ChannelSet& channels,
                                     const core::SystemConfig& config,
                                     const ScaState& state, long l_d, long l_c,
                                     const VectorXd& relay_rates,
                                     SubproblemLayout* layout_out) {
    const int n_tx = config.n_tx;
    const int m_total = config.num_groups();
    const int k_total = config.num_users();
    const long l_n = l_d + l_c;
    const double theta = static_cast<double>(l_d) / static_cast<double>(l_n);
    const bool has_common = config.strategy != core::Strategy::Sdma;
    const bool cooperative = l_c > 0 && has_common;

    SubproblemLayout ly;
    ly.n_tx = n_tx;
    ly.num_groups = m_total;
    ly.num_users = k_total;
    ly.has_common = has_common;
    if (layout_out) *layout_out = ly;

    auto of = group_lookup(config);
    const double b_const = config.finite() ? fbl::penalty_constant(config.effective_bler()) : 0.0;

    // Private streams that have collapsed to zero power are pinned off: their
    // quadratic-over-linear tangent vanishes, which would make the
    // restriction infeasible, while "off" is exactly representable by fixing
    // the stream at zero and letting the group ride on its common share.
    std::vector<bool> stream_off(m_total, false);
    if (has_common) {
        const double off_tol = kStreamOffFraction * std::max(1.0, config.p_tx);
        for (int m = 0; m < m_total; ++m) {
            stream_off[m] = state.precoders.col(m + 1).squaredNorm() <= off_tol;
        }
    }

    conic::ProgramBuilder pb(ly.total());
    pb.set_objective(ly.t(), -1.0);  // maximize t

    // Stream column in the state precoder matrix for layout stream index s.
    auto state_col = [&](int s) { return has_common ? s : s + 1; };

    // --- nonnegative block ---
    int nn_rows = 0;
    for (int m = 0; m < m_total; ++m) {  // C_m + theta alpha_p,m - t >= 0
        int r = pb.add_row(0.0);
        if (has_common) pb.coeff(r, ly.c(m), 1.0);
        pb.coeff(r, ly.alpha_p(m), theta);
        pb.coeff(r, ly.t(), -1.0);
        ++nn_rows;
    }
    if (has_common) {
        for (int k = 0; k < k_total; ++k) {  // common decodability
            const bool relay_user = in_relay_group(config, k);
            double offset = 0.0;
            if (cooperative && !relay_user) offset = std::max(0.0, relay_rates[k]);
            int r = pb.add_row(offset);
            pb.coeff(r, ly.alpha_c(k), theta);
            for (int m = 0; m < m_total; ++m) pb.coeff(r, ly.c(m), -1.0);
            ++nn_rows;
        }
        for (int m = 0; m < m_total; ++m) {  // c >= 0
            int r = pb.add_row(0.0);
            pb.coeff(r, ly.c(m), 1.0);
            ++nn_rows;
        }
        for (int k = 0; k < k_total; ++k) {  // rho_c >= 0
            int r = pb.add_row(0.0);
            pb.coeff(r, ly.rho_c(k), 1.0);
            ++nn_rows;
        }
    }
    for (int k = 0; k < k_total; ++k) {  // rho_p >= 0
        if (stream_off[of[k]]) continue;  // pinned to zero below instead
        int r = pb.add_row(0.0);
        pb.coeff(r, ly.rho_p(k), 1.0);
        ++nn_rows;
    }
    pb.tag_cone(conic::ConeType::NonNeg, nn_rows);

    // --- rate restrictions: alpha + taylor(rho) <= log2(1 + rho) ---
    auto add_rate_cone = [&](int alpha_var, int rho_var, double rho_n) {
        TaylorCoeffs tc;
        if (b_const > 0.0) tc = taylor_sqrt_dispersion(rho_n, l_d, b_const);
        int r0 = pb.add_row(tc.intercept * kLn2);
        pb.coeff(r0, alpha_var, kLn2);
        pb.coeff(r0, rho_var, tc.slope * kLn2);
        pb.add_row(1.0);
        int r2 = pb.add_row(1.0);
        pb.coeff(r2, rho_var, 1.0);
        pb.tag_cone(conic::ConeType::Exp, 3);
    };
    for (int k = 0; k < k_total; ++k) {
        if (has_common) add_rate_cone(ly.alpha_c(k), ly.rho_c(k), state.rho_common[k]);
        if (!stream_off[of[k]]) {
            add_rate_cone(ly.alpha_p(of[k]), ly.rho_p(k), state.rho_private[k]);
        }
    }

    // --- SINR restrictions: interference + 1 <= linearized signal / rho ---
    VectorXd re_row, im_row;
    auto add_qol_cone = [&](int k, int signal_stream, int rho_var, double rho_n,
                            bool skip_own) {
        const VectorXcd h = channels.downlink.col(k);
        auto lin = linearize_qol(h, state.precoders.col(state_col(signal_stream)), rho_n);
        int r_u = pb.add_row(-1.0);
        for (int i = 0; i < 2 * n_tx; ++i) {
            pb.coeff(r_u, ly.p(signal_stream, i), lin.p_coeffs[i]);
        }
        pb.coeff(r_u, rho_var, lin.rho_coeff);
        pb.add_row(0.5);
        int w_rows = 0;
        inner_product_rows(h, re_row, im_row);
        const int first_private = has_common ? 1 : 0;
        for (int s = first_private; s < ly.num_streams(); ++s) {
            if (skip_own && s == signal_stream) continue;
            int rr = pb.add_row(0.0);
            int ri = pb.add_row(0.0);
            for (int i = 0; i < 2 * n_tx; ++i) {
                pb.coeff(rr, ly.p(s, i), re_row[i]);
                pb.coeff(ri, ly.p(s, i), im_row[i]);
            }
            w_rows += 2;
        }
        pb.tag_cone(conic::ConeType::RotatedSoc, 2 + w_rows);
    };
    for (int k = 0; k < k_total; ++k) {
        if (has_common) add_qol_cone(k, 0, ly.rho_c(k), state.rho_common[k], false);
        if (!stream_off[of[k]]) {
            int own_stream = has_common ? of[k] + 1 : of[k];
            add_qol_cone(k, own_stream, ly.rho_p(k), state.rho_private[k], true);
        }
    }

    // --- power budget ---
    pb.add_row(std::sqrt(config.p_tx));
    for (int s = 0; s < ly.num_streams(); ++s) {
        for (int i = 0; i < 2 * n_tx; ++i) {
            int r = pb.add_row(0.0);
            pb.coeff(r, ly.p(s, i), 1.0);
        }
    }
    pb.tag_cone(conic::ConeType::Soc, 1 + ly.num_streams() * 2 * n_tx);

    // --- pinned-off streams ---
    int zero_rows = 0;
    for (int m = 0; m < m_total; ++m) {
        if (!stream_off[m]) continue;
        for (int i = 0; i < 2 * n_tx; ++i) {
            int r = pb.add_row(0.0);
            pb.coeff(r, ly.p(m + 1, i), 1.0);
            ++zero_rows;
        }
        int r = pb.add_row(0.0);
        pb.coeff(r, ly.alpha_p(m), 1.0);
        ++zero_rows;
    }
    for (int k = 0; k < k_total; ++k) {
        if (!stream_off[of[k]]) continue;
        int r = pb.add_row(0.0);
        pb.coeff(r, ly.rho_p(k), 1.0);
        ++zero_rows;
    }
    if (zero_rows > 0) pb.tag_cone(conic::ConeType::Zero, zero_rows);

    auto program = pb.build();
    conic::normalize_cones(program);
    return program;
}

ScaState initialize_precoders(const chan::ChannelSet& channels,
                              const core::SystemConfig& config) {
    const int n_tx = config.n_tx;
    const int m_total = config.num_groups();
    if (channels.downlink.norm() <= 0.0) {
        throw std::invalid_argument("initialize_precoders: all-zero channel matrix");
    }

    // Deterministic phase convention: first nonzero coordinate real-positive.
    auto fix_phase = [](VectorXcd v) {
        for (int i = 0; i < v.size(); ++i) {
            if (std::abs(v[i]) > 1e-12) {
                v *= std::conj(v[i]) / std::abs(v[i]);
                break;
            }
        }
        return v;
    };
    auto dominant_direction = [&](const MatrixXcd& cols) {
        if (cols.cols() == 1) return fix_phase(cols.col(0).normalized());
        Eigen::JacobiSVD<MatrixXcd> svd(cols, Eigen::ComputeThinU);
        return fix_phase(VectorXcd(svd.matrixU().col(0)));
    };

    const bool has_common = config.strategy != core::Strategy::Sdma;
    const double q_common = has_common ? config.p_tx / 2.0 : 0.0;
    const double q_private = (config.p_tx - q_common) / m_total;

    ScaState state;
    state.precoders = MatrixXcd::Zero(n_tx, m_total + 1);
    if (has_common) {
        state.precoders.col(0) = std::sqrt(q_common) * dominant_direction(channels.downlink);
    }
    for (int m = 0; m < m_total; ++m) {
        MatrixXcd cols(n_tx, config.groups[m].size());
        for (std::size_t i = 0; i < config.groups[m].size(); ++i) {
            cols.col(i) = channels.downlink.col(config.groups[m][i] - 1);
        }
        state.precoders.col(m + 1) = std::sqrt(q_private) * dominant_direction(cols);
    }

    SinrTable sinrs = evaluate_sinrs(channels, state.precoders, config);
    state.rho_common = sinrs.common.cwiseMax(kRhoFloor);
    state.rho_private = sinrs.priv.cwiseMax(kRhoFloor);
    state.objective = 0.0;
    state.iterate = 0;
    return state;
}

core::Solution sca_solve(const chan::ChannelSet& channels, const core::SystemConfig& config,
                         long l_d, long l_c, const ScaState& init,
                         const ScaOptions& options) {
    if ((init.rho_common.size() && init.rho_common.minCoeff() <= 0.0) ||
        (init.rho_private.size() && init.rho_private.minCoeff() <= 0.0)) {
        throw std::invalid_argument("sca_solve: init rho must be positive");
    }
    const int m_total = config.num_groups();
    const long l_n = l_d + l_c;
    const double theta = static_cast<double>(l_d) / static_cast<double>(l_n);
    const bool has_common = config.strategy != core::Strategy::Sdma;

    VectorXd relay = relay_common_rates(channels, config, l_c, theta);

    ScaState state = init;
    state.rho_common = state.rho_common.cwiseMax(kRhoFloor);
    state.rho_private = state.rho_private.cwiseMax(kRhoFloor);

    SubproblemLayout ly;
    VectorXd prev_x;
    VectorXd best_c = VectorXd::Zero(m_total);
    std::vector<double> trace;
    double prev_t = 0.0;
    bool converged = false;
    int iterations = 0;

    for (int n = 1; n <= options.max_iterations; ++n) {
        auto program = build_subproblem(channels, config, state, l_d, l_c, relay, &ly);
        if (n >= 2 && options.on_iteration) options.on_iteration(program, prev_x);
        auto sol = conic::solve_conic(program);
        if (sol.status != conic::SolveStatus::Optimal) {
            // Numerical trouble (e.g. a near-degenerate instance at vanishing
            // transmit power) terminates the loop; the current iterate is
            // still feasible, so report it. Any other failure on the warm
            // start indicates a broken restriction and is a hard error.
            if (n == 1 && sol.status != conic::SolveStatus::Numerical) {
                throw std::runtime_error(
                    "sca_solve: conic solve failed on the feasible warm start (" +
                    conic::to_string(sol.status) + ")");
            }
            break;  // keep the best iterate so far
        }
        iterations = n;
        double t_star = sol.x[ly.t()];
        for (int s = 0; s < ly.num_streams(); ++s) {
            int col = has_common ? s : s + 1;
            for (int i = 0; i < config.n_tx; ++i) {
                state.precoders(i, col) = {sol.x[ly.p(s, i)], sol.x[ly.p(s, config.n_tx + i)]};
            }
        }
        for (int k = 0; k < config.num_users(); ++k) {
            if (has_common) state.rho_common[k] = std::max(sol.x[ly.rho_c(k)], kRhoFloor);
            state.rho_private[k] = std::max(sol.x[ly.rho_p(k)], kRhoFloor);
        }
        if (has_common) {
            for (int m = 0; m < m_total; ++m) best_c[m] = std::max(0.0, sol.x[ly.c(m)]);
            // Snap collapsed private streams to exactly zero so the next
            // restriction pins them off and the iterate keeps satisfying it.
            const double off_tol = kStreamOffFraction * std::max(1.0, config.p_tx);
            auto of = group_lookup(config);
            for (int m = 0; m < m_total; ++m) {
                if (state.precoders.col(m + 1).squaredNorm() > off_tol) continue;
                state.precoders.col(m + 1).setZero();
                for (int i = 0; i < 2 * config.n_tx; ++i) sol.x[ly.p(m + 1, i)] = 0.0;
                sol.x[ly.alpha_p(m)] = 0.0;
                for (int k = 0; k < config.num_users(); ++k) {
                    if (of[k] != m) continue;
                    sol.x[ly.rho_p(k)] = 0.0;
                    state.rho_private[k] = kRhoFloor;
                }
            }
        }
        state.objective = t_star;
        state.iterate = n;
        trace.push_back(t_star);
        prev_x = sol.x;
        if (std::abs(t_star - prev_t) < config.sca_tolerance) {
            converged = true;
            break;
        }
        prev_t = t_star;
    }

    core::Solution out;
    out.precoders = state.precoders;
    // Rescale infinitesimally if the solver landed a hair above the budget.
    double power = out.precoders.squaredNorm();
    if (power > config.p_tx) out.precoders *= std::sqrt(config.p_tx / power);
    out.common_split = best_c;
    out.l_d = l_d;
    out.l_c = l_c;
    out.theta = theta;
    out.objective = state.objective;
    out.iterations = iterations;
    out.converged = converged;
    out.objective_trace = trace;
    auto rates = achieved_rates(channels, config, out.precoders, out.common_split, l_d, l_c);
    out.group_rates = rates.group_rates;
    out.common_rate = rates.common_rate;
    out.mmf = rates.mmf;
    return out;
}

}  // namespace rsfbl::sca
