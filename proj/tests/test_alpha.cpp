#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "esmda/alpha.hpp"

using esmda::AlphaSchedule;

TEST_CASE("equal weights") {
    const auto s = AlphaSchedule::equal_weights(4);
    REQUIRE(s.length() == 4);
    for (double a : s.values())
        CHECK(a == 4.0);
    CHECK(esmda::validate(s).ok);

    const auto single = AlphaSchedule::equal_weights(1);
    CHECK(single.values() == esmda::la::Vector{1.0});
    CHECK(esmda::validate(single).ok);

    const auto two = AlphaSchedule::equal_weights(2);
    CHECK(two.values() == esmda::la::Vector{2.0, 2.0});
    CHECK(esmda::validate(two).residual == 0.0);

    CHECK_THROWS_AS(AlphaSchedule::equal_weights(0), std::invalid_argument);
}

TEST_CASE("geometric decreasing hits the closed form") {
    const auto three = AlphaSchedule::geometric_decreasing(3, 0.5);
    // 1/a (1 + 2 + 4) = 1 forces a = 7.
    CHECK(three.values() == esmda::la::Vector{7.0, 3.5, 1.75});
    CHECK(esmda::validate(three).ok);

    const auto four = AlphaSchedule::geometric_decreasing(4, 0.5);
    CHECK(four.values() == esmda::la::Vector{15.0, 7.5, 3.75, 1.875});
    CHECK(esmda::validate(four).ok);

    const auto one = AlphaSchedule::geometric_decreasing(1, 0.3);
    CHECK(one.values() == esmda::la::Vector{1.0});

    for (std::size_t l = 0; l + 1 < four.length(); ++l)
        CHECK(four.values()[l] > four.values()[l + 1]);

    CHECK_THROWS_AS(AlphaSchedule::geometric_decreasing(3, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(AlphaSchedule::geometric_decreasing(3, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(AlphaSchedule::geometric_decreasing(3, -0.5),
                    std::invalid_argument);
}

TEST_CASE("ratio near one approaches equal weights") {
    for (std::size_t n_a = 1; n_a <= 8; ++n_a) {
        const auto s = AlphaSchedule::geometric_decreasing(n_a, 0.999);
        for (double a : s.values())
            CHECK(std::abs(a - static_cast<double>(n_a)) <=
                  0.01 * static_cast<double>(n_a));
    }
}

TEST_CASE("validate accepts only normalized positive schedules") {
    const auto bad = AlphaSchedule::from_values({2.0, 3.0});
    const auto report = esmda::validate(bad);
    CHECK_FALSE(report.ok);
    // 1/2 + 1/3 - 1 = -1/6.
    CHECK(report.residual == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
    CHECK(report.message.find("sum(1/alpha)") != std::string::npos);

    CHECK(esmda::validate(AlphaSchedule::from_values({1.0})).ok);

    CHECK_THROWS_AS(AlphaSchedule::from_values({1.0, -1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(AlphaSchedule::from_values({}), std::invalid_argument);
}

TEST_CASE("every constructor's output passes validate") {
    for (std::size_t n_a = 1; n_a <= 12; ++n_a) {
        CHECK(esmda::validate(AlphaSchedule::equal_weights(n_a)).ok);
        for (const double ratio : {0.3, 0.5, 0.9}) {
            const auto s = AlphaSchedule::geometric_decreasing(n_a, ratio);
            CAPTURE(n_a);
            CAPTURE(ratio);
            CHECK(esmda::validate(s).ok);
        }
    }
}
