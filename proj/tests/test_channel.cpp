#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "rsfbl/channel.hpp"

using namespace rsfbl;

namespace {

core::SystemConfig two_user(double var2 = 0.09) {
    core::SystemConfig c;
    c.n_tx = 4;
    c.groups = {{1}, {2}};
    c.channel_variances = {1.0, var2};
    c.p_tx = 100.0;
    c.l_total = 500;
    return c;
}

}  // namespace

TEST_CASE("same seed gives bit-identical channels") {
    auto c = two_user();
    auto a = chan::sample_channels(c, 42, true);
    auto b = chan::sample_channels(c, 42, true);
    CHECK(a.downlink == b.downlink);
    CHECK(a.relay == b.relay);
    auto d = chan::sample_channels(c, 43, true);
    CHECK(a.downlink != d.downlink);
}

TEST_CASE("downlink draw does not depend on the relay table") {
    auto c = two_user();
    auto with = chan::sample_channels(c, 7, true);
    auto without = chan::sample_channels(c, 7, false);
    CHECK(with.downlink == without.downlink);
    CHECK(!without.has_relay());
    CHECK(with.has_relay());
}

TEST_CASE("empirical variance tracks the configured one") {
    auto c = two_user(0.09);
    double sum1 = 0.0, sum2 = 0.0;
    int n = 0;
    for (int i = 0; i < 2500; ++i) {
        auto s = chan::sample_channels(c, chan::mix_seed(1234, i), false);
        sum1 += s.downlink.col(0).squaredNorm();
        sum2 += s.downlink.col(1).squaredNorm();
        n += c.n_tx;
    }
    CHECK(sum1 / n == doctest::Approx(1.0).epsilon(0.05));
    CHECK(sum2 / n == doctest::Approx(0.09).epsilon(0.05));
}

TEST_CASE("ensemble round trips through both file formats") {
    auto c = two_user();
    auto e = chan::make_ensemble(c, 99, 3, true);
    for (const char* name : {"chan_rt.bin", "chan_rt.json"}) {
        std::string path = std::string("/tmp/rsfbl_") + name;
        chan::save_ensemble(e, path);
        auto back = chan::load_ensemble(path, c);
        REQUIRE(back.realizations.size() == e.realizations.size());
        CHECK(back.base_seed == e.base_seed);
        CHECK(back.fingerprint == e.fingerprint);
        for (std::size_t i = 0; i < e.realizations.size(); ++i) {
            CHECK(back.realizations[i].downlink == e.realizations[i].downlink);
            CHECK(back.realizations[i].relay == e.realizations[i].relay);
            CHECK(back.realizations[i].seed == e.realizations[i].seed);
        }
        std::remove(path.c_str());
    }
}

TEST_CASE("loading against an inconsistent config fails") {
    auto c = two_user();
    auto e = chan::make_ensemble(c, 5, 2, false);
    const std::string path = "/tmp/rsfbl_chan_check.bin";
    chan::save_ensemble(e, path);

    SUBCASE("wrong user count -> dimension error") {
        core::SystemConfig other = c;
        other.groups = {{1}, {2}, {3}};
        other.channel_variances = {1.0, 0.09, 0.01};
        CHECK_THROWS_WITH_AS(chan::load_ensemble(path, other),
                             doctest::Contains("dimensions"), std::runtime_error);
    }
    SUBCASE("changed variances -> provenance error") {
        core::SystemConfig other = c;
        other.channel_variances = {1.0, 0.5};
        CHECK_THROWS_WITH_AS(chan::load_ensemble(path, other),
                             doctest::Contains("fingerprint"), std::runtime_error);
    }
    SUBCASE("truncated file -> malformed error") {
        std::ifstream in(path, std::ios::binary);
        std::string all((std::istreambuf_iterator<char>(in)), {});
        in.close();
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(all.data(), static_cast<long>(all.size() / 2));
        out.close();
        CHECK_THROWS_AS(chan::load_ensemble(path), std::runtime_error);
    }
    std::remove(path.c_str());
}

TEST_CASE("per-index seeds are reproducible") {
    auto c = two_user();
    auto e = chan::make_ensemble(c, 77, 4, false);
    for (int i = 0; i < 4; ++i) {
        auto again = chan::sample_channels(c, chan::mix_seed(77, i), false);
        CHECK(again.downlink == e.realizations[i].downlink);
    }
}
