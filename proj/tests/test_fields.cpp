#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "morrey/fields.hpp"

using namespace morrey;
using morrey::testing::two_dirac_1d;

namespace {

PiecewiseLinear ramp() { return PiecewiseLinear({0.0, 1.0}, {0.0, 1.0}); }

}  // namespace

TEST_CASE("piecewise linear evaluation and tails") {
    PiecewiseLinear f = ramp();
    CHECK(f.value(-5.0) == 0.0);
    CHECK(f.value(0.25) == doctest::Approx(0.25));
    CHECK(f.value(7.0) == 1.0);
    CHECK(f.slope(0) == doctest::Approx(1.0));
    CHECK(f.grad_pnorm_pow(3.0) == doctest::Approx(1.0));

    PiecewiseConstant d = f.derivative();
    CHECK(d.value(0.5) == doctest::Approx(1.0));
    CHECK(d.value(-0.5) == 0.0);
    CHECK(d.value(1.5) == 0.0);
    CHECK(d.q_norm_pow(2.0) == doctest::Approx(1.0));
}

TEST_CASE("piecewise constant is right-continuous with zero tails") {
    PiecewiseConstant f({0.0, 1.0, 2.0}, {-1.0, 2.0});
    CHECK(f.value(0.0) == -1.0);
    CHECK(f.value(1.0) == 2.0);
    CHECK(f.value(2.0) == 0.0);
    CHECK(f.value(-0.1) == 0.0);
    CHECK(f.q_norm_pow(2.0) == doctest::Approx(5.0));
}

TEST_CASE("integrate kills constants and evaluates ramps") {
    SignedMeasure rho = two_dirac_1d();
    PiecewiseLinear c({0.0, 1.0}, {3.0, 3.0});
    CHECK(integrate(c, rho) == doctest::Approx(0.0));
    CHECK(integrate(ramp(), rho) == doctest::Approx(1.0));
}

TEST_CASE("integrate is invariant under adding constants") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    SignedMeasure rho = two_dirac_1d();
    for (int t = 0; t < 50; ++t) {
        PiecewiseLinear w = random_piecewise_linear(rng, -1.0, 2.0, 5, 2.0);
        double base = integrate(w, rho);
        double shifted = integrate(w.shifted(u(rng)), rho);
        CHECK(std::abs(shifted - base) <= 1e-10 * std::max(1.0, std::abs(base)));
    }
}

TEST_CASE("affine precomposition matches direct evaluation") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 30; ++t) {
        PiecewiseLinear f = random_piecewise_linear(rng, -1.0, 1.5, 6, 3.0);
        double a = u(rng);
        if (std::abs(a) < 0.1) a = 0.5;
        double b = u(rng);
        PiecewiseLinear g = f.precompose_affine(a, b);
        for (double x : {-3.0, -0.7, 0.0, 0.3, 1.9}) {
            CHECK(g.value(x) == doctest::Approx(f.value(a * x + b)).epsilon(1e-12));
        }
    }
}

TEST_CASE("combine forms exact linear combinations") {
    std::mt19937_64 rng(9);
    PiecewiseLinear f = random_piecewise_linear(rng, -1.0, 1.0, 4, 1.0);
    PiecewiseLinear g = random_piecewise_linear(rng, -0.5, 1.5, 5, 1.0);
    PiecewiseLinear h = combine(2.0, f, -3.0, g);
    for (double x : {-2.0, -0.9, 0.1, 0.77, 1.2, 3.0}) {
        CHECK(h.value(x) ==
              doctest::Approx(2.0 * f.value(x) - 3.0 * g.value(x)).epsilon(1e-12));
    }
}

TEST_CASE("grid field interpolation and far-field modes") {
    GridField f(2, 2.0, 5, GridField::FarField::Clamp);
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 5; ++i) {
            Vec x = f.node(i, j);
            f.values()[f.index(i, j)] = 0.5 * x[0] - x[1];
        }
    CHECK(f.value(Vec{1.0, -1.0}) == doctest::Approx(1.5));
    CHECK(f.value(Vec{0.5, 0.5}) == doctest::Approx(-0.25));
    // clamp mode continues the boundary value
    CHECK(f.value(Vec{10.0, 0.0}) == doctest::Approx(f.value(Vec{2.0, 0.0})));

    GridField strict(2, 2.0, 5, f.values(), GridField::FarField::Strict);
    CHECK_THROWS_AS(strict.value(Vec{10.0, 0.0}), ValidationError);

    SignedMeasure rho = validate_measure({{Vec{3.0, 0.0}, 1.0}, {Vec{0.0, 0.0}, -1.0}});
    CHECK_THROWS_AS(integrate(f, rho), ValidationError);
}

TEST_CASE("log-space power products avoid overflow") {
    double v = pow_abs_times(1e200, 2.0, 1e-250);
    CHECK(v == doctest::Approx(1e150).epsilon(1e-12));
    CHECK(pow_abs_times(0.0, 3.0, 1.0) == 0.0);
    CHECK(pow_abs_times(2.0, 3.0, 0.5) == doctest::Approx(4.0));
}
