#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rsfbl/channel.hpp"
#include "rsfbl/fbl.hpp"
#include "rsfbl/strategies.hpp"

using namespace rsfbl;

namespace {

core::SystemConfig single_user_config() {
    core::SystemConfig cfg;
    cfg.n_tx = 3;
    cfg.groups = {{1}};
    cfg.channel_variances = {1.0};
    cfg.p_tx = 10.0;
    cfg.l_total = 200;
    return cfg;
}

}  // namespace

TEST_CASE("single user: every strategy matches the closed-form rate") {
    core::SystemConfig cfg = single_user_config();
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto ch = chan::sample_channels(cfg, seed);
        double gamma = cfg.p_tx * ch.downlink.col(0).squaredNorm();
        for (auto strategy :
             {core::Strategy::Rsma, core::Strategy::Sdma, core::Strategy::Noma}) {
            cfg.strategy = strategy;
            fbl::FblParams fp{cfg.effective_bler(), cfg.l_total, 1.0, false};
            double oracle = fbl::fbl_rate(gamma, fp);
            auto run = strat::solve(ch, cfg);
            CHECK(run.mode == "fin");
            CHECK(run.solution.mmf == doctest::Approx(oracle).epsilon(1e-3));
        }
    }
}

TEST_CASE("zero transmit power gives zero rate") {
    core::SystemConfig cfg = single_user_config();
    cfg.p_tx = 1e-12;
    auto ch = chan::sample_channels(cfg, 9);
    auto run = strat::solve_rsma(ch, cfg);
    CHECK(run.solution.mmf <= 1e-6);
}

TEST_CASE("sdma never uses the common stream") {
    core::SystemConfig cfg;
    cfg.n_tx = 2;
    cfg.groups = {{1}, {2}};
    cfg.channel_variances = {1.0, 1.0};
    cfg.p_tx = 10.0;
    cfg.l_total = 300;
    auto ch = chan::sample_channels(cfg, 3);
    auto run = strat::solve_sdma(ch, cfg);
    CHECK(run.strategy == "SDMA");
    CHECK(run.solution.precoders.col(0).norm() == 0.0);
    CHECK(run.solution.common_split.isZero());
}

TEST_CASE("rsma at least matches sdma on identical channels") {
    core::SystemConfig cfg;
    cfg.n_tx = 2;
    cfg.groups = {{1}, {2}};
    cfg.channel_variances = {1.0, 1.0};
    cfg.p_tx = 100.0;
    cfg.l_total = 300;
    auto ch = chan::sample_channels(cfg, 11);
    ch.downlink.col(1) = ch.downlink.col(0);  // fully aligned users
    auto rsma = strat::solve_rsma(ch, cfg);
    auto sdma = strat::solve_sdma(ch, cfg);
    CHECK(rsma.solution.mmf >= sdma.solution.mmf - 1e-6);
    // Aligned users leave SDMA interference-limited; splitting wins clearly.
    CHECK(rsma.solution.mmf > sdma.solution.mmf);
}

TEST_CASE("noma decoding order and message combining") {
    core::SystemConfig cfg;
    cfg.n_tx = 2;
    cfg.groups = {{1}, {2}};
    cfg.channel_variances = {1.0, 0.09};
    cfg.p_tx = 10.0;
    cfg.l_total = 300;
    cfg.strategy = core::Strategy::Noma;
    auto ch = chan::sample_channels(cfg, 4);

    auto order = strat::noma_decoding_order(ch);
    CHECK(order.size() == 2);
    CHECK(ch.downlink.col(order[0]).squaredNorm() >=
          ch.downlink.col(order[1]).squaredNorm());

    // Ties break toward the lower user index.
    chan::ChannelSet tied = ch;
    tied.downlink.col(1) = tied.downlink.col(0) * std::complex<double>(0.0, 1.0);
    auto tie_order = strat::noma_decoding_order(tied);
    CHECK(tie_order[0] == 0);
    CHECK(tie_order[1] == 1);

    auto run = strat::solve_noma(ch, cfg);
    CHECK(run.strategy == "NOMA");
    CHECK(run.solution.mmf > 0.0);
    // The weak message is decoded by both users; its rate is the worse of
    // the two decoders, so re-evaluation must reproduce group_rates.
    Eigen::MatrixXcd by_order(cfg.n_tx, 2);
    for (int j = 0; j < 2; ++j) {
        int m = core::group_of(cfg, order[j] + 1) - 1;
        by_order.col(j) = run.solution.precoders.col(m + 1);
    }
    auto rates = strat::noma_group_rates(ch, cfg, by_order, cfg.l_total);
    CHECK(rates.isApprox(run.solution.group_rates, 1e-12));
}

TEST_CASE("noma rejects non-singleton groups") {
    core::SystemConfig cfg;
    cfg.n_tx = 2;
    cfg.groups = {{1, 2}, {3}};
    cfg.channel_variances = {1.0, 1.0, 1.0};
    cfg.p_tx = 10.0;
    cfg.l_total = 300;
    auto ch = chan::sample_channels(cfg, 5);
    CHECK_THROWS(strat::solve_noma(ch, cfg));
}

TEST_CASE("c-rsma candidate grid") {
    core::SystemConfig cfg;
    cfg.n_tx = 2;
    cfg.groups = {{1}, {2}};
    cfg.channel_variances = {1.0, 0.09};
    cfg.p_tx = 10.0;
    cfg.p_relay = 10.0;
    cfg.strategy = core::Strategy::Crsma;
    cfg.l_total = 300;
    auto ch = chan::sample_channels(cfg, 21);
    REQUIRE(ch.has_relay());

    auto run = strat::solve_crsma(ch, cfg);
    CHECK(run.candidates.size() == 11);  // l_c in {100, 110, ..., 200}
    CHECK(run.candidates.front().first == 100);
    CHECK(run.candidates.back().first == 200);
    double best = -1.0;
    long best_lc = 0;
    for (auto [lc, t] : run.candidates) {
        if (t > best) {
            best = t;
            best_lc = lc;
        }
    }
    CHECK(run.solution.l_c == best_lc);
    CHECK(run.solution.objective == doctest::Approx(best));
    CHECK(run.solution.theta ==
          doctest::Approx(double(cfg.l_total - best_lc) / cfg.l_total));

    cfg.l_total = 200;
    auto tight = strat::solve_crsma(ch, cfg);
    CHECK(tight.candidates.size() == 1);
    CHECK(tight.solution.l_c == 100);
    CHECK(tight.solution.theta == doctest::Approx(0.5));
}

TEST_CASE("zero relay links never beat the non-cooperative solver") {
    core::SystemConfig cfg;
    cfg.n_tx = 2;
    cfg.groups = {{1}, {2}};
    cfg.channel_variances = {1.0, 0.09};
    cfg.p_tx = 10.0;
    cfg.p_relay = 10.0;
    cfg.strategy = core::Strategy::Crsma;
    cfg.l_total = 300;
    auto ch = chan::sample_channels(cfg, 33);
    ch.relay.setZero();
    auto coop = strat::solve_crsma(ch, cfg);
    core::SystemConfig ncfg = cfg;
    ncfg.strategy = core::Strategy::Rsma;
    ncfg.p_relay = 0.0;
    ncfg.bler = cfg.effective_bler();
    chan::ChannelSet nch = ch;
    nch.relay.resize(0, 0);
    auto plain = strat::solve_rsma(nch, ncfg);
    CHECK(coop.solution.mmf <= plain.solution.mmf + 1e-3);
}

TEST_CASE("inf-fin evaluation") {
    core::SystemConfig cfg;
    cfg.n_tx = 2;
    cfg.groups = {{1}, {2}};
    cfg.channel_variances = {1.0, 0.09};
    cfg.p_tx = 10.0;
    cfg.l_total = 500;
    cfg.blocklength_mode = core::BlocklengthMode::Infinite;
    auto ch = chan::sample_channels(cfg, 7);
    auto inf = strat::solve_rsma(ch, cfg);
    CHECK(inf.mode == "inf");

    SUBCASE("self-evaluation in infinite mode never loses rate") {
        // Re-evaluation re-splits the common budget optimally for the fixed
        // precoders, so it can only match or slightly beat the iterative
        // solver's own split.
        auto self = strat::evaluate_inf_fin(ch, cfg, inf.solution);
        CHECK(self.mode == "inf-fin");
        CHECK(self.solution.mmf >= inf.solution.mmf - 1e-9);
        CHECK(self.solution.mmf == doctest::Approx(inf.solution.mmf).epsilon(1e-2));
    }

    SUBCASE("finite re-evaluation never beats the finite optimizer by much") {
        core::SystemConfig fin = cfg;
        fin.blocklength_mode = core::BlocklengthMode::Finite;
        auto cross = strat::evaluate_inf_fin(ch, fin, inf.solution);
        auto direct = strat::solve_rsma(ch, fin);
        CHECK(cross.solution.mmf <= direct.solution.mmf + 10 * fin.sca_tolerance);
    }

    SUBCASE("a near-half block error rate removes the penalty") {
        core::SystemConfig fin = cfg;
        fin.blocklength_mode = core::BlocklengthMode::Finite;
        fin.bler = 0.5 - 1e-12;  // Q^-1 -> 0: finite and infinite coincide
        core::SystemConfig inf_at_half = cfg;
        inf_at_half.bler = 0.5 - 1e-12;
        auto base = strat::solve_rsma(ch, inf_at_half);
        auto cross = strat::evaluate_inf_fin(ch, fin, base.solution);
        auto self = strat::evaluate_inf_fin(ch, inf_at_half, base.solution);
        CHECK(cross.solution.mmf == doctest::Approx(self.solution.mmf).epsilon(1e-9));
    }
}
