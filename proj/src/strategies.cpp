#include "rsfbl/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rsfbl/fbl.hpp"
#include "rsfbl/sca.hpp"

namespace rsfbl::strat {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kRhoFloor = 1e-12;

std::string mode_tag(const core::SystemConfig& config) {
    return config.finite() ? "fin" : "inf";
}

void require_valid(const core::SystemConfig& config) {
    auto errors = core::validate(config);
    if (!errors.empty()) {
        throw std::invalid_argument("invalid config: " + errors.front());
    }
}

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

VectorXcd fix_phase(VectorXcd v) {
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-12) {
            v *= std::conj(v[i]) / std::abs(v[i]);
            break;
        }
    }
    return v;
}

/// Exact water-fill of a common-rate budget toward the bottleneck groups:
/// maximize min_m (base_m + C_m) subject to sum C = budget, C >= 0.
VectorXd waterfill_split(const VectorXd& base, double budget) {
    const int m_total = static_cast<int>(base.size());
    VectorXd split = VectorXd::Zero(m_total);
    if (budget <= 0.0 || m_total == 0) return split;
    std::vector<int> order(m_total);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return base[a] < base[b]; });
    double level = 0.0, acc = 0.0;
    int filled = m_total;
    for (int k = 1; k <= m_total; ++k) {
        acc += base[order[k - 1]];
        level = (budget + acc) / k;
        if (k == m_total || level <= base[order[k]]) {
            filled = k;
            break;
        }
    }
    for (int i = 0; i < filled; ++i) split[order[i]] = level - base[order[i]];
    return split;
}

// Start profiles for the common-stream restriction: the balanced profile
// plus common-dominant ones. The balanced start can stall in an
// interference-limited local optimum (most visibly with few antennas) while
// the global design routes almost everything through the common stream;
// either start alone can also be infeasible when a user sits below the
// common-stream break-even point.
std::vector<sca::ScaState> common_stream_starts(const chan::ChannelSet& channels,
                                                const core::SystemConfig& config,
                                                const sca::ScaState& init) {
    std::vector<sca::ScaState> starts = {init};
    const double total = init.precoders.squaredNorm();
    const double p_common = init.precoders.col(0).squaredNorm();
    const double p_private = total - p_common;
    if (p_common > 0.0 && p_private > 0.0 && init.precoders.cols() > 1) {
        auto rescaled = [&](double common_share) {
            sca::ScaState s = init;
            s.precoders.col(0) *= std::sqrt(common_share * total / p_common);
            s.precoders.rightCols(s.precoders.cols() - 1) *=
                std::sqrt((1.0 - common_share) * total / p_private);
            auto sinrs = sca::evaluate_sinrs(channels, s.precoders, config);
            s.rho_common = sinrs.common.cwiseMax(kRhoFloor);
            s.rho_private = sinrs.priv.cwiseMax(kRhoFloor);
            return s;
        };
        sca::ScaState heavy = rescaled(0.9);
        starts.push_back(heavy);
        starts.push_back(rescaled(0.99));

        // One start per group with that group's private stream off and the
        // group served by its common share alone: the optimum often sits in
        // that corner for weak users, and the smooth path into it is blocked
        // by the vanishing tangents of a dying stream.
        if (config.num_groups() >= 2) {
            for (int m = 0; m < config.num_groups(); ++m) {
                sca::ScaState cut = heavy;
                cut.precoders.col(m + 1).setZero();
                auto s = sca::evaluate_sinrs(channels, cut.precoders, config);
                cut.rho_common = s.common.cwiseMax(kRhoFloor);
                cut.rho_private = s.priv.cwiseMax(kRhoFloor);
                starts.push_back(cut);
            }
        }
        // Pure multicast: every private stream off, the full budget on the
        // common stream. Optimal when all users are interference-limited.
        {
            sca::ScaState cut = init;
            cut.precoders.rightCols(cut.precoders.cols() - 1).setZero();
            cut.precoders.col(0) *= std::sqrt(total / p_common);
            auto s = sca::evaluate_sinrs(channels, cut.precoders, config);
            cut.rho_common = s.common.cwiseMax(kRhoFloor);
            cut.rho_private = s.priv.cwiseMax(kRhoFloor);
            starts.push_back(cut);
        }
    }
    return starts;
}

// Rebuild an SCA iterate around a previously solved precoder matrix so it can
// seed a related subproblem (e.g. the next blocklength-split candidate).
sca::ScaState state_from_precoders(const chan::ChannelSet& channels,
                                   const core::SystemConfig& config,
                                   const Eigen::MatrixXcd& precoders) {
    sca::ScaState s;
    s.precoders = precoders;
    auto sinrs = sca::evaluate_sinrs(channels, precoders, config);
    s.rho_common = sinrs.common.cwiseMax(kRhoFloor);
    s.rho_private = sinrs.priv.cwiseMax(kRhoFloor);
    return s;
}

core::Solution run_downlink_sca(const chan::ChannelSet& channels,
                                const core::SystemConfig& config) {
    auto init = sca::initialize_precoders(channels, config);
    if (config.strategy == core::Strategy::Sdma) {
        return sca::sca_solve(channels, config, config.l_total, 0, init);
    }

    core::Solution best;
    bool have_best = false;
    for (const auto& start : common_stream_starts(channels, config, init)) {
        try {
            auto sol = sca::sca_solve(channels, config, config.l_total, 0, start);
            if (!have_best || sol.mmf > best.mmf) {
                best = sol;
                have_best = true;
            }
        } catch (const std::runtime_error&) {
            continue;
        }
    }
    if (!have_best) {
        throw std::runtime_error(
            "run_downlink_sca: every start was infeasible for the common-stream "
            "restriction");
    }
    return best;
}

// ---------------------------------------------------------------------------
// NOMA: successive decoding with one (decoder, message) SINR variable per
// pair, same restriction machinery as the grouped case.

struct NomaLayout {
    int n_tx = 0, k_total = 0;
    std::vector<std::pair<int, int>> pairs;  // (decoder order idx, message order idx)
    int t() const { return 0; }
    int p(int stream, int coord) const { return 1 + stream * 2 * n_tx + coord; }
    int alpha(int pair) const { return 1 + k_total * 2 * n_tx + pair; }
    int rho(int pair) const { return alpha(0) + static_cast<int>(pairs.size()) + pair; }
    int total() const { return rho(0) + static_cast<int>(pairs.size()); }
};

struct NomaState {
    MatrixXcd precoders;  // n_tx x K, column j = message of order index j
    VectorXd rho;         // per pair
};

double pair_sinr(const chan::ChannelSet& channels, const std::vector<int>& order,
                 const MatrixXcd& precoders, int i_ord, int j_ord) {
    const VectorXcd h = channels.downlink.col(order[i_ord]);
    double interference = 1.0;
    for (int jp = 0; jp < j_ord; ++jp) {
        interference += std::norm(h.dot(precoders.col(jp)));
    }
    return std::norm(h.dot(precoders.col(j_ord))) / interference;
}

conic::ConicProgram build_noma_subproblem(const chan::ChannelSet& channels,
                                          const core::SystemConfig& config,
                                          const std::vector<int>& order,
                                          const NomaState& state, const NomaLayout& ly) {
    const int n_tx = config.n_tx;
    const double b_const =
        config.finite() ? fbl::penalty_constant(config.effective_bler()) : 0.0;
    const long l_n = config.l_total;

    conic::ProgramBuilder pb(ly.total());
    pb.set_objective(ly.t(), -1.0);  // maximize t

    int nn_rows = 0;
    for (std::size_t q = 0; q < ly.pairs.size(); ++q) {  // alpha_q - t >= 0
        int r = pb.add_row(0.0);
        pb.coeff(r, ly.alpha(static_cast<int>(q)), 1.0);
        pb.coeff(r, ly.t(), -1.0);
        ++nn_rows;
    }
    for (std::size_t q = 0; q < ly.pairs.size(); ++q) {  // rho >= 0
        int r = pb.add_row(0.0);
        pb.coeff(r, ly.rho(static_cast<int>(q)), 1.0);
        ++nn_rows;
    }
    pb.tag_cone(conic::ConeType::NonNeg, nn_rows);

    for (std::size_t q = 0; q < ly.pairs.size(); ++q) {
        sca::TaylorCoeffs tc;
        if (b_const > 0.0) tc = sca::taylor_sqrt_dispersion(state.rho[q], l_n, b_const);
        int r0 = pb.add_row(tc.intercept * kLn2);
        pb.coeff(r0, ly.alpha(static_cast<int>(q)), kLn2);
        pb.coeff(r0, ly.rho(static_cast<int>(q)), tc.slope * kLn2);
        pb.add_row(1.0);
        int r2 = pb.add_row(1.0);
        pb.coeff(r2, ly.rho(static_cast<int>(q)), 1.0);
        pb.tag_cone(conic::ConeType::Exp, 3);
    }

    VectorXd re_row, im_row;
    for (std::size_t q = 0; q < ly.pairs.size(); ++q) {
        auto [i_ord, j_ord] = ly.pairs[q];
        const VectorXcd h = channels.downlink.col(order[i_ord]);
        auto lin = sca::linearize_qol(h, state.precoders.col(j_ord), state.rho[q]);
        int r_u = pb.add_row(-1.0);
        for (int i = 0; i < 2 * n_tx; ++i) pb.coeff(r_u, ly.p(j_ord, i), lin.p_coeffs[i]);
        pb.coeff(r_u, ly.rho(static_cast<int>(q)), lin.rho_coeff);
        pb.add_row(0.5);
        int w_rows = 0;
        inner_product_rows(h, re_row, im_row);
        for (int jp = 0; jp < j_ord; ++jp) {
            int rr = pb.add_row(0.0);
            int ri = pb.add_row(0.0);
            for (int i = 0; i < 2 * n_tx; ++i) {
                pb.coeff(rr, ly.p(jp, i), re_row[i]);
                pb.coeff(ri, ly.p(jp, i), im_row[i]);
            }
            w_rows += 2;
        }
        pb.tag_cone(conic::ConeType::RotatedSoc, 2 + w_rows);
    }

    pb.add_row(std::sqrt(config.p_tx));
    for (int s = 0; s < ly.k_total; ++s) {
        for (int i = 0; i < 2 * n_tx; ++i) {
            int r = pb.add_row(0.0);
            pb.coeff(r, ly.p(s, i), 1.0);
        }
    }
    pb.tag_cone(conic::ConeType::Soc, 1 + ly.k_total * 2 * n_tx);

    auto program = pb.build();
    conic::normalize_cones(program);
    return program;
}

}  // namespace

std::vector<int> noma_decoding_order(const chan::ChannelSet& channels) {
    const int k_total = static_cast<int>(channels.downlink.cols());
    std::vector<int> order(k_total);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return channels.downlink.col(a).squaredNorm() > channels.downlink.col(b).squaredNorm();
    });
    return order;
}

Eigen::VectorXd noma_group_rates(const chan::ChannelSet& channels,
                                 const core::SystemConfig& config,
                                 const MatrixXcd& precoders, long l_n) {
    const int k_total = config.num_users();
    auto order = noma_decoding_order(channels);
    std::vector<int> order_of(k_total);
    for (int j = 0; j < k_total; ++j) order_of[order[j]] = j;

    // precoders column j carries the message of order index j.
    fbl::FblParams fp{config.effective_bler(), l_n, 1.0, !config.finite()};
    VectorXd message_rate(k_total);
    for (int j = 0; j < k_total; ++j) {
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= j; ++i) {
            double gamma = pair_sinr(channels, order, precoders, i, j);
            worst = std::min(worst, std::max(0.0, fbl::fbl_rate(gamma, fp)));
        }
        message_rate[j] = worst;
    }
    VectorXd rates(config.num_groups());
    for (int m = 0; m < config.num_groups(); ++m) {
        rates[m] = message_rate[order_of[config.groups[m][0] - 1]];
    }
    return rates;
}

StrategyRun solve_rsma(const chan::ChannelSet& channels, const core::SystemConfig& config) {
    core::SystemConfig cfg = config;
    cfg.strategy = core::Strategy::Rsma;
    require_valid(cfg);
    StrategyRun run;
    run.strategy = "RSMA";
    run.mode = mode_tag(cfg);
    // The common-stream formulation cannot represent "common stream off":
    // every user must keep a common SINR above the penalty break-even point,
    // and a channel draw below that point makes the restriction infeasible
    // outright. Solve the private-only restriction too and keep the better
    // design; it is the only candidate when the common stream cannot help.
    bool have_common = true;
    try {
        run.solution = run_downlink_sca(channels, cfg);
    } catch (const std::runtime_error&) {
        have_common = false;
    }
    core::SystemConfig off = cfg;
    off.strategy = core::Strategy::Sdma;
    off.bler = cfg.effective_bler();
    auto without_common = run_downlink_sca(channels, off);
    if (!have_common || without_common.mmf > run.solution.mmf) {
        run.solution = without_common;
    }
    return run;
}

StrategyRun solve_sdma(const chan::ChannelSet& channels, const core::SystemConfig& config) {
    core::SystemConfig cfg = config;
    cfg.strategy = core::Strategy::Sdma;
    require_valid(cfg);
    StrategyRun run;
    run.strategy = "SDMA";
    run.mode = mode_tag(cfg);
    run.solution = run_downlink_sca(channels, cfg);
    return run;
}

StrategyRun solve_crsma(const chan::ChannelSet& channels, const core::SystemConfig& config) {
    core::SystemConfig cfg = config;
    cfg.strategy = core::Strategy::Crsma;
    require_valid(cfg);
    if (!channels.has_relay()) {
        throw std::invalid_argument("solve_crsma: channel set has no relay links");
    }
    const long start = cfg.lc_grid.start;
    const long step = cfg.lc_grid.step;
    if (cfg.l_total < 2 * start) {
        throw std::invalid_argument("solve_crsma: no feasible blocklength split");
    }

    StrategyRun run;
    run.strategy = "C-RSMA";
    run.mode = mode_tag(cfg);
    auto init = sca::initialize_precoders(channels, cfg);
    // Two-stage initialization in finite mode: the penalty-free subproblem is
    // much easier for SCA to traverse (no break-even floor on the common
    // stream), so solve it first and warm-start the finite solve from its
    // design. This keeps the finite result at least as good as re-evaluating
    // the asymptotic design, without which the finite scan stalls early on
    // many draws. The generic profile stays in as a safety net.
    core::SystemConfig inf_cfg = cfg;
    inf_cfg.blocklength_mode = core::BlocklengthMode::Infinite;
    std::vector<core::Solution> feasible_sols;
    for (long l_c = start; cfg.l_total - l_c >= start; l_c += step) {
        std::vector<sca::ScaState> starts;
        if (cfg.finite()) {
            try {
                auto pre = sca::sca_solve(channels, inf_cfg, cfg.l_total - l_c, l_c, init);
                starts.push_back(state_from_precoders(channels, cfg, pre.precoders));
            } catch (const std::runtime_error&) {
                // Fall through to the generic start alone.
            }
        }
        starts.push_back(init);
        core::Solution sol;
        bool feasible = false;
        for (const auto& s : starts) {
            try {
                auto cand = sca::sca_solve(channels, cfg, cfg.l_total - l_c, l_c, s);
                if (!feasible || cand.objective > sol.objective) {
                    sol = cand;
                    feasible = true;
                }
            } catch (const std::runtime_error&) {
                // A split can leave some user below the common-stream
                // break-even point; drop that start and keep scanning.
                continue;
            }
        }
        if (!feasible) continue;
        run.candidates.emplace_back(l_c, sol.objective);
        feasible_sols.push_back(std::move(sol));
    }
    if (feasible_sols.empty()) {
        throw std::runtime_error("solve_crsma: every blocklength split was infeasible");
    }
    // Objectives are only meaningful to the solver tolerance, so candidates
    // within that tolerance of the maximum count as ties, resolved toward the
    // smallest l_c. Long blocks make the objective nearly flat in l_c and an
    // exact argmax there would be noise-driven.
    double best_obj = feasible_sols.front().objective;
    for (const auto& s : feasible_sols) best_obj = std::max(best_obj, s.objective);
    for (const auto& s : feasible_sols) {
        if (s.objective >= best_obj - cfg.sca_tolerance) {
            run.solution = s;
            break;
        }
    }
    return run;
}

StrategyRun solve_noma(const chan::ChannelSet& channels, const core::SystemConfig& config) {
    core::SystemConfig cfg = config;
    cfg.strategy = core::Strategy::Noma;
    require_valid(cfg);
    for (const auto& g : cfg.groups) {
        if (g.size() != 1) {
            throw std::invalid_argument("solve_noma: groups must be singletons");
        }
    }
    const int k_total = cfg.num_users();
    const int n_tx = cfg.n_tx;
    auto order = noma_decoding_order(channels);

    NomaLayout ly;
    ly.n_tx = n_tx;
    ly.k_total = k_total;
    for (int j = 0; j < k_total; ++j) {
        for (int i = 0; i <= j; ++i) ly.pairs.emplace_back(i, j);
    }

    NomaState state;
    state.precoders.resize(n_tx, k_total);
    for (int j = 0; j < k_total; ++j) {
        state.precoders.col(j) = std::sqrt(cfg.p_tx / k_total) *
                                 fix_phase(channels.downlink.col(order[j]).normalized());
    }
    state.rho.resize(static_cast<int>(ly.pairs.size()));
    for (std::size_t q = 0; q < ly.pairs.size(); ++q) {
        auto [i_ord, j_ord] = ly.pairs[q];
        state.rho[q] =
            std::max(pair_sinr(channels, order, state.precoders, i_ord, j_ord), kRhoFloor);
    }

    std::vector<double> trace;
    double prev_t = 0.0, t_star = 0.0;
    bool converged = false;
    int iterations = 0;
    for (int n = 1; n <= 200; ++n) {
        auto program = build_noma_subproblem(channels, cfg, order, state, ly);
        auto sol = conic::solve_conic(program);
        if (sol.status != conic::SolveStatus::Optimal) {
            if (n == 1) {
                throw std::runtime_error("solve_noma: conic solve failed (" +
                                         conic::to_string(sol.status) + ")");
            }
            break;
        }
        iterations = n;
        t_star = sol.x[ly.t()];
        for (int j = 0; j < k_total; ++j) {
            for (int i = 0; i < n_tx; ++i) {
                state.precoders(i, j) = {sol.x[ly.p(j, i)], sol.x[ly.p(j, n_tx + i)]};
            }
        }
        for (std::size_t q = 0; q < ly.pairs.size(); ++q) {
            state.rho[q] = std::max(sol.x[ly.rho(static_cast<int>(q))], kRhoFloor);
        }
        trace.push_back(t_star);
        if (std::abs(t_star - prev_t) < cfg.sca_tolerance) {
            converged = true;
            break;
        }
        prev_t = t_star;
    }

    double power = state.precoders.squaredNorm();
    if (power > cfg.p_tx) state.precoders *= std::sqrt(cfg.p_tx / power);

    StrategyRun run;
    run.strategy = "NOMA";
    run.mode = mode_tag(cfg);
    core::Solution out;
    out.precoders = MatrixXcd::Zero(n_tx, k_total + 1);
    std::vector<int> order_of(k_total);
    for (int j = 0; j < k_total; ++j) order_of[order[j]] = j;
    for (int m = 0; m < k_total; ++m) {
        out.precoders.col(m + 1) = state.precoders.col(order_of[cfg.groups[m][0] - 1]);
    }
    out.common_split = VectorXd::Zero(k_total);
    out.l_d = cfg.l_total;
    out.l_c = 0;
    out.theta = 1.0;
    out.objective = t_star;
    out.iterations = iterations;
    out.converged = converged;
    out.objective_trace = trace;
    out.group_rates = noma_group_rates(channels, cfg, state.precoders, cfg.l_total);
    out.common_rate = 0.0;
    out.mmf = std::max(0.0, out.group_rates.minCoeff());
    run.solution = out;
    return run;
}

StrategyRun solve(const chan::ChannelSet& channels, const core::SystemConfig& config) {
    switch (config.strategy) {
        case core::Strategy::Rsma: return solve_rsma(channels, config);
        case core::Strategy::Sdma: return solve_sdma(channels, config);
        case core::Strategy::Noma: return solve_noma(channels, config);
        case core::Strategy::Crsma: return solve_crsma(channels, config);
    }
    throw std::logic_error("solve: unknown strategy");
}

StrategyRun evaluate_inf_fin(const chan::ChannelSet& channels,
                             const core::SystemConfig& config,
                             const core::Solution& inf_solution) {
    core::SystemConfig cfg = config;
    require_valid(cfg);
    if (inf_solution.precoders.rows() != cfg.n_tx ||
        inf_solution.precoders.cols() != cfg.num_groups() + 1) {
        throw std::invalid_argument("evaluate_inf_fin: precoder dimensions mismatch");
    }

    StrategyRun run;
    run.strategy = core::to_string(cfg.strategy);
    run.mode = "inf-fin";
    core::Solution out = inf_solution;

    if (cfg.strategy == core::Strategy::Noma) {
        // Private-only: nothing to re-split, just re-evaluate the rates.
        auto order = noma_decoding_order(channels);
        MatrixXcd by_order(cfg.n_tx, cfg.num_users());
        for (int j = 0; j < cfg.num_users(); ++j) {
            int m = core::group_of(cfg, order[j] + 1) - 1;
            by_order.col(j) = inf_solution.precoders.col(m + 1);
        }
        out.group_rates = noma_group_rates(channels, cfg, by_order, cfg.l_total);
        out.mmf = std::max(0.0, out.group_rates.minCoeff());
        run.solution = out;
        return run;
    }

    // Base private rates with no common allocation, then re-split the common
    // budget toward the bottleneck groups.
    VectorXd zero_split = VectorXd::Zero(cfg.num_groups());
    auto base = sca::achieved_rates(channels, cfg, inf_solution.precoders, zero_split,
                                    inf_solution.l_d, inf_solution.l_c);
    VectorXd split = waterfill_split(base.group_rates, base.common_rate);
    auto rated = sca::achieved_rates(channels, cfg, inf_solution.precoders, split,
                                     inf_solution.l_d, inf_solution.l_c);
    out.common_split = split;
    out.group_rates = rated.group_rates;
    out.common_rate = rated.common_rate;
    out.mmf = rated.mmf;
    run.solution = out;
    return run;
}

}  // namespace rsfbl::strat
