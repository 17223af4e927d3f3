#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qrad/estimator.hpp"

using namespace qrad;

TEST_CASE("energy bound scales as r^6 t^2 k^9 to machine precision")
{
    BoundInputs base{.r_max = 1.3, .t_max = 2.7, .k_c = 0.9};
    const double e0 = energy_bound(base);
    REQUIRE(e0 > 0.0);

    BoundInputs r = base;
    r.r_max *= 2.0;
    CHECK(energy_bound(r) / e0 == 64.0); // 2^6, exact in binary

    BoundInputs t = base;
    t.t_max *= 2.0;
    CHECK(energy_bound(t) / e0 == 4.0);

    BoundInputs k = base;
    k.k_c *= 2.0;
    CHECK(energy_bound(k) / e0 == 512.0);
}

TEST_CASE("per-mode bound scales as t^2 r^6 k^5 / V")
{
    BoundInputs base{.r_max = 1.0, .t_max = 1.0, .k_c = 1.0, .v_quant = 1.0};
    const double n0 = per_mode_bound(base);
    REQUIRE(n0 > 0.0);

    BoundInputs k = base;
    k.k_c *= 2.0;
    CHECK(per_mode_bound(k) / n0 == 32.0);

    BoundInputs v = base;
    v.v_quant *= 2.0;
    CHECK(per_mode_bound(v) / n0 == 0.5);
}

TEST_CASE("the prefactor enters the bounds linearly")
{
    BoundInputs a{.r_max = 0.7, .t_max = 3.0, .k_c = 1.1, .v_quant = 5.0, .c_order = 1.0};
    BoundInputs b = a;
    b.c_order = 7.5;
    CHECK(energy_bound(b) == Catch::Approx(7.5 * energy_bound(a)).epsilon(1e-15));
    CHECK(per_mode_bound(b) == Catch::Approx(7.5 * per_mode_bound(a)).epsilon(1e-15));
}

TEST_CASE("degenerate extents give a zero bound")
{
    BoundInputs z{.r_max = 0.0, .t_max = 2.0, .k_c = 3.0};
    CHECK(energy_bound(z) == 0.0);
    z = BoundInputs{.r_max = 1.0, .t_max = 0.0, .k_c = 3.0};
    CHECK(energy_bound(z) == 0.0);
}

TEST_CASE("invalid inputs are rejected")
{
    BoundInputs neg{.r_max = -1.0, .t_max = 1.0, .k_c = 1.0};
    CHECK_THROWS_AS(energy_bound(neg), validation_error);

    BoundInputs no_volume{.r_max = 1.0, .t_max = 1.0, .k_c = 1.0};
    CHECK_THROWS_AS(per_mode_bound(no_volume), validation_error);

    BoundInputs bad_c{.r_max = 1.0, .t_max = 1.0, .k_c = 1.0, .v_quant = 1.0, .c_order = -2.0};
    CHECK_THROWS_AS(energy_bound(bad_c), validation_error);
}
