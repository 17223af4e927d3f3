#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qrad/gnm.hpp"

using namespace qrad;

namespace {

// Independent oracle: the same double sum written without the even-l
// shortcut, keeping the ((-1)^l + 1) factor explicit.
big_rational kernel_oracle(int p)
{
    big_rational sum = 0;
    for (int l = 0; l <= p; ++l) {
        big_int inner = 0;
        for (int s = 0; s <= p - l; ++s)
            inner += big_binomial(p - l, s) * big_factorial(4 + l + 2 * s)
                     * big_factorial(3 - l - 2 * s + 2 * p);
        const big_int parity = (l % 2 == 0) ? 2 : 0; // (-1)^l + 1
        const big_int outer = big_binomial(p, l) * (big_int(1) << l) * parity;
        const big_rational angular =
            big_rational(1, l + 1) + big_rational(1, l + 3);
        sum += big_rational(outer * inner) * angular;
    }
    return sum / big_rational(big_factorial(8 + 2 * p));
}

} // namespace

TEST_CASE("lowest kernel is exactly 1/105")
{
    CHECK(gnm_exact(0, 0) == big_rational(1, 105));
}

TEST_CASE("kernels match the unshortcut double-sum oracle")
{
    for (int p = 0; p <= 8; ++p) CHECK(gnm_exact(p, 0) == kernel_oracle(p));
}

TEST_CASE("symmetry, anti-diagonal equality, and positivity up to order six")
{
    for (int n = 0; n <= 6; ++n) {
        for (int m = 0; m <= 6 - n; ++m) {
            const big_rational v = gnm_exact(n, m);
            CHECK(v > 0);
            CHECK(v == gnm_exact(m, n));
            // the value depends on n and m only through n + m
            CHECK(v == gnm_exact(n + m, 0));
        }
    }
}

TEST_CASE("numeric realization at unit medium constant")
{
    const double expected = 1.0 / 105.0 / std::pow(2.0 * std::numbers::pi, 3);
    CHECK(gnm_numeric(0, 0, 1.0) == Catch::Approx(expected).epsilon(1e-15));
    CHECK(expected == Catch::Approx(3.84e-5).epsilon(0.01));
}

TEST_CASE("medium-constant scaling follows the 3 + n + m power")
{
    for (int n = 0; n <= 3; ++n) {
        for (int m = 0; m <= 3; ++m) {
            const double ratio = gnm_numeric(n, m, 2.0) / gnm_numeric(n, m, 1.0);
            CHECK(ratio == Catch::Approx(std::pow(2.0, 3 + n + m)).epsilon(1e-13));
        }
    }
}

TEST_CASE("numeric values agree along anti-diagonals")
{
    const double a = gnm_numeric(1, 1, 1.78);
    CHECK(a == gnm_numeric(0, 2, 1.78));
    CHECK(a == gnm_numeric(2, 0, 1.78));
}

TEST_CASE("numeric path is bit-identical to the rational-to-double conversion")
{
    for (int n = 0; n <= 3; ++n) {
        for (int m = 0; m <= 3 - n; ++m) {
            const double from_exact = gnm_exact(n, m).convert_to<double>()
                                      * std::pow(1.78, 3 + n + m)
                                      / std::pow(2.0 * std::numbers::pi, 3);
            CHECK(gnm_numeric(n, m, 1.78) == from_exact);
        }
    }
}

TEST_CASE("table construction matches the direct evaluation")
{
    const auto t = build_gnm_table(4, 1.78);
    for (int n = 0; n <= 4; ++n)
        for (int m = 0; m <= 4; ++m) {
            CHECK(t.kernel(n, m) == gnm_exact(n, m));
            CHECK(t.value(n, m) == gnm_numeric(n, m, 1.78));
        }
}

TEST_CASE("invalid arguments are rejected")
{
    CHECK_THROWS_AS(gnm_exact(-1, 0), validation_error);
    CHECK_THROWS_AS(gnm_numeric(0, 0, 0.5), validation_error);
    CHECK_THROWS_AS(build_gnm_table(-2, 1.0), validation_error);
}

TEST_CASE("large orders stay exact where 64-bit factorials would overflow")
{
    // (8 + 2p)! for p = 7 already exceeds 2^63; the rational path must not care
    const big_rational v = gnm_exact(7, 0);
    CHECK(v > 0);
    CHECK(v == gnm_exact(3, 4));
}
