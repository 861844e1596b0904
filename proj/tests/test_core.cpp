#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "rsfbl/config.hpp"

using namespace rsfbl::core;

namespace {

SystemConfig fig2a_like() {
    SystemConfig c;
    c.n_tx = 4;
    c.groups = {{1}, {2}};
    c.channel_variances = {1.0, 0.09};
    c.p_tx = 100.0;
    c.l_total = 500;
    c.strategy = Strategy::Rsma;
    return c;
}

}  // namespace

TEST_CASE("valid config passes validation") {
    CHECK(validate(fig2a_like()).empty());
}

TEST_CASE("overlapping groups are rejected") {
    auto c = fig2a_like();
    c.groups = {{1, 2}, {2}};
    c.channel_variances = {1.0, 1.0, 1.0};
    auto errs = validate(c);
    CHECK(!errs.empty());
    bool found = false;
    for (const auto& e : errs) found = found || e.find("overlap") != std::string::npos;
    CHECK(found);
}

TEST_CASE("C-RSMA needs room for both phases") {
    auto c = fig2a_like();
    c.strategy = Strategy::Crsma;
    c.l_total = 150;
    auto errs = validate(c);
    bool found = false;
    for (const auto& e : errs) found = found || e.find("l_total") != std::string::npos;
    CHECK(found);
    c.l_total = 200;
    CHECK(validate(c).empty());
}

TEST_CASE("bler bounds") {
    auto c = fig2a_like();
    c.bler = 0.7;
    CHECK(!validate(c).empty());
    c.bler = 1e-5;
    CHECK(validate(c).empty());
}

TEST_CASE("default bler per strategy") {
    CHECK(default_bler(Strategy::Rsma) == 5e-6);
    CHECK(default_bler(Strategy::Noma) == 5e-6);
    CHECK(default_bler(Strategy::Crsma) == 5e-6);
    CHECK(default_bler(Strategy::Sdma) == 1e-5);
}

TEST_CASE("group_of lookup") {
    SystemConfig c = fig2a_like();
    c.groups = {{1}, {2, 3}};
    c.channel_variances = {1.0, 1.0, 1.0};
    CHECK(group_of(c, 3) == 2);
    CHECK(group_of(c, 1) == 1);
    CHECK_THROWS_AS(group_of(c, 9), std::out_of_range);
}

TEST_CASE("every user appears exactly once across groups") {
    for (auto groups : {std::vector<std::vector<int>>{{1}, {2, 3}, {4}},
                        std::vector<std::vector<int>>{{2, 1}, {3, 4}}}) {
        SystemConfig c = fig2a_like();
        c.groups = groups;
        c.channel_variances.assign(4, 1.0);
        CHECK(validate(c).empty());
        int total = 0;
        for (const auto& g : c.groups) total += static_cast<int>(g.size());
        CHECK(total == c.num_users());
        for (int k = 1; k <= c.num_users(); ++k) CHECK_NOTHROW(group_of(c, k));
    }
}

TEST_CASE("config json round trip") {
    auto c = fig2a_like();
    c.bler = 2e-6;
    c.p_relay = 33.0;
    c.strategy = Strategy::Crsma;
    c.l_total = 400;
    c.blocklength_mode = BlocklengthMode::Infinite;
    auto back = config_from_json(to_json(c));
    CHECK(back.n_tx == c.n_tx);
    CHECK(back.groups == c.groups);
    CHECK(back.channel_variances == c.channel_variances);
    CHECK(back.p_tx == c.p_tx);
    CHECK(back.p_relay == c.p_relay);
    CHECK(back.bler == c.bler);
    CHECK(back.l_total == c.l_total);
    CHECK(back.strategy == c.strategy);
    CHECK(back.blocklength_mode == c.blocklength_mode);
    CHECK(back.sca_tolerance == c.sca_tolerance);
    CHECK(back.lc_grid.start == c.lc_grid.start);
    CHECK(back.lc_grid.step == c.lc_grid.step);
    CHECK(to_json(back) == to_json(c));
}
