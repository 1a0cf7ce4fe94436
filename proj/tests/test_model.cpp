#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "irsnoma/model.hpp"

using namespace irsnoma;

namespace {

Scenario table1() {
    Scenario s;
    s.n_elements = 32;
    s.bs_link = BsLink{LinkFading(6.0), -65.0};
    s.ue[0] = UeConfig{LinkFading(3.0), -70.0, 30.0};
    s.ue[1] = UeConfig{LinkFading(1.5), -70.0, 30.0};
    s.noise_power_dbm = -110.0;
    return s;
}

} // namespace

TEST_CASE("db_to_linear", "[model]") {
    CHECK(db_to_linear(0.0) == 1.0);
    CHECK(db_to_linear(30.0) == Catch::Approx(1000.0).epsilon(1e-12));
    CHECK(db_to_linear(-70.0) == Catch::Approx(1e-7).epsilon(1e-12));
    CHECK_THROWS_AS(db_to_linear(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("LinkFading bounds", "[model]") {
    CHECK(LinkFading(0.5).m == 0.5);
    CHECK_THROWS_AS(LinkFading(0.3), std::domain_error);
    CHECK_THROWS_AS(LinkFading(std::nan("")), std::domain_error);
}

TEST_CASE("split_from_alpha", "[model]") {
    const Split half = split_from_alpha(0.5, 32);
    CHECK(half.n1 == 16);
    CHECK(half.n2 == 16);
    CHECK(half.alpha == 0.5);

    const Split up = split_from_alpha(0.51, 32); // ceil(16.32)
    CHECK(up.n1 == 17);
    CHECK(up.n2 == 15);

    const Split zero = split_from_alpha(0.0, 32);
    CHECK(zero.n1 == 0);
    CHECK(zero.n2 == 32);

    const Split one = split_from_alpha(1.0, 32);
    CHECK(one.n1 == 32);
    CHECK(one.n2 == 0);

    CHECK_THROWS_AS(split_from_alpha(-0.01, 32), std::domain_error);
    CHECK_THROWS_AS(split_from_alpha(1.01, 32), std::domain_error);
    CHECK_THROWS_AS(split_from_alpha(0.5, 0), std::domain_error);
}

TEST_CASE("alpha_grid sizes and round-trip", "[model]") {
    CHECK(alpha_grid(2).size() == 3);
    CHECK(alpha_grid(32).size() == 33);
    CHECK(alpha_grid(1).size() == 2);

    for (int n : {1, 2, 7, 32, 49, 100}) {
        const auto grid = alpha_grid(n);
        REQUIRE(static_cast<int>(grid.size()) == n + 1);
        for (const Split& s : grid) {
            CHECK(s.n1 + s.n2 == n);
            const Split back = split_from_alpha(s.alpha, n);
            CHECK(back.n1 == s.n1);
        }
    }
}

TEST_CASE("MomentPair and GammaParams invariants", "[model]") {
    CHECK_NOTHROW(MomentPair(1.0, 2.0));
    CHECK_NOTHROW(MomentPair(2.0, 4.0)); // zero variance allowed at the type level
    CHECK_THROWS_AS(MomentPair(2.0, 3.0), std::domain_error);
    CHECK_THROWS_AS(MomentPair(-1.0, 2.0), std::domain_error);

    const GammaParams g(3.0, 2.0);
    CHECK(g.mean() == 6.0);
    CHECK(g.second_moment() == 48.0);
    CHECK_THROWS_AS(GammaParams(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(GammaParams(1.0, -1.0), std::domain_error);
}

TEST_CASE("Scenario validation", "[model]") {
    CHECK_NOTHROW(table1().validate());

    Scenario bad_m = table1();
    bad_m.ue[1].fading.m = 0.3;
    CHECK_THROWS_AS(bad_m.validate(), std::invalid_argument);

    Scenario bad_pl = table1();
    bad_pl.ue[0].pathloss_db = 3.0;
    CHECK_THROWS_AS(bad_pl.validate(), std::invalid_argument);

    Scenario bad_n = table1();
    bad_n.n_elements = 0;
    CHECK_THROWS_AS(bad_n.validate(), std::invalid_argument);
}

TEST_CASE("Scenario unit conversions", "[model]") {
    const Scenario s = table1();
    CHECK(s.ue_power_mw(1) == Catch::Approx(1000.0).epsilon(1e-12));
    CHECK(s.noise_mw() == Catch::Approx(1e-11).epsilon(1e-12));
    CHECK(s.bs_pathloss_linear() * s.ue_pathloss_linear(1) ==
          Catch::Approx(std::pow(10.0, -13.5)).epsilon(1e-12));
}
