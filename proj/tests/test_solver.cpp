#include <random>

#include "convex_oracle.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "morrey/solver.hpp"

using namespace morrey;
using morrey::testing::dipole_2d;

namespace {

GridField random_field(std::mt19937_64& rng, int m, double L) {
    GridField f(2, L, m);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& v : f.values()) v = u(rng);
    return f;
}

std::vector<double> fd_gradient(const GridField& u, const Exponent& e, double eps) {
    GridField work = u;
    std::vector<double> g(u.values().size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        double saved = work.values()[k];
        work.values()[k] = saved + eps;
        double ep = energy(work, e);
        work.values()[k] = saved - eps;
        double em = energy(work, e);
        work.values()[k] = saved;
        g[k] = (ep - em) / (2.0 * eps);
    }
    return g;
}

}  // namespace

TEST_CASE("splat places weights multilinearly") {
    GridField grid(2, 2.0, 5);  // h = 1, nodes at integers
    // atom exactly on a node
    SignedMeasure on_node = validate_measure({{Vec{1.0, 0.0}, 1.0}, {Vec{-1.0, 0.0}, -1.0}});
    Splat s1(on_node, grid);
    CHECK(s1.weights().size() == 2);
    for (const auto& [k, w] : s1.weights()) CHECK(std::abs(std::abs(w) - 1.0) < 1e-15);

    // atom at a cell center spreads into four quarters
    SignedMeasure center = validate_measure({{Vec{0.5, 0.5}, 1.0}, {Vec{-1.0, 0.0}, -1.0}});
    Splat s2(center, grid);
    int quarters = 0;
    for (const auto& [k, w] : s2.weights())
        if (std::abs(w - 0.25) < 1e-15) ++quarters;
    CHECK(quarters == 4);

    // the discrete pairing annihilates constants exactly
    std::vector<double> ones(grid.node_count(), 1.0);
    CHECK(s1.pair(ones) == 0.0);
    CHECK(s2.pair(ones) == 0.0);

    SignedMeasure outside = validate_measure({{Vec{5.0, 0.0}, 1.0}, {Vec{0.0, 0.0}, -1.0}});
    CHECK_THROWS_AS(Splat(outside, grid), ValidationError);
}

TEST_CASE("splat pairing matches interpolation at the atoms") {
    std::mt19937_64 rng(41);
    GridField f = random_field(rng, 9, 2.0);
    SignedMeasure rho =
        validate_measure({{Vec{0.63, -0.41}, 2.0}, {Vec{-1.2, 0.77}, -1.5}, {Vec{0.3, 1.1}, -0.5}});
    Splat s(rho, f);
    double via_pairing = s.pair(f.values());
    double via_interp = integrate(f, rho);
    CHECK(via_pairing == doctest::Approx(via_interp).epsilon(1e-12));
}

TEST_CASE("energy of constants and affine fields") {
    Exponent e(4.0, 2);
    GridField c(2, 3.0, 17);
    for (double& v : c.values()) v = 2.5;
    CHECK(energy(c, e) == 0.0);
    GridField g = energy_gradient(c, e);
    for (double v : g.values()) CHECK(v == 0.0);

    // affine l(x) = g . x has every cell gradient equal to g
    GridField aff(2, 3.0, 17);
    Vec slope{0.75, -0.4};
    for (int j = 0; j < 17; ++j)
        for (int i = 0; i < 17; ++i) aff.values()[aff.index(i, j)] = slope.dot(aff.node(i, j));
    double expected = std::pow(2.0 * 3.0, 2) * std::pow(slope.norm_sq(), 2.0);
    CHECK(energy(aff, e) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("energy p-homogeneity") {
    std::mt19937_64 rng(43);
    Exponent e(4.0, 2);
    GridField f = random_field(rng, 11, 2.0);
    double base = energy(f, e);
    for (double t : {0.5, 2.0, 3.7}) {
        GridField scaled = f;
        for (double& v : scaled.values()) v *= t;
        CHECK(energy(scaled, e) == doctest::Approx(std::pow(t, e.p()) * base).epsilon(1e-12));
    }
}

TEST_CASE("energy gradient matches central finite differences") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 20; ++trial) {
        Exponent e(trial % 2 == 0 ? 4.0 : 2.5, 2);
        GridField f = random_field(rng, 5, 1.0);
        GridField g = energy_gradient(f, e);
        std::vector<double> fd = fd_gradient(f, e, 1e-6);
        double scale = 0.0;
        for (double v : g.values()) scale = std::max(scale, std::abs(v));
        double worst = 0.0;
        for (std::size_t k = 0; k < fd.size(); ++k)
            worst = std::max(worst, std::abs(fd[k] - g.values()[k]));
        CHECK(worst < 1e-5 * std::max(scale, 1e-12));
    }
}

TEST_CASE("euler identity ties multiplier to energy") {
    std::mt19937_64 rng(53);
    Exponent e(4.0, 2);
    GridField f = random_field(rng, 9, 2.0);
    double value = 0.0;
    std::vector<double> grad;
    energy_and_gradient(f, e, value, grad);
    double pairing = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) pairing += grad[k] * f.values()[k];
    CHECK(pairing / e.p() == doctest::Approx(value).epsilon(1e-12));
}

TEST_CASE("el_residual worked examples") {
    Exponent e(4.0, 2);
    GridField grid(2, 3.0, 13);
    SignedMeasure rho = dipole_2d();
    Splat m(rho, grid);

    // constant field: residual reduces to the largest pairing weight
    GridField c = grid;
    for (double& v : c.values()) v = 1.0;
    double expected = 0.0;
    for (const auto& [k, w] : m.weights()) expected = std::max(expected, std::abs(w));
    CHECK(el_residual(c, m, 2.0, e) == doctest::Approx(expected));

    // invariance under adding constants
    std::mt19937_64 rng(59);
    GridField f = random_field(rng, 13, 3.0);
    double r0 = el_residual(f, m, 1.5, e);
    GridField shifted = f;
    for (double& v : shifted.values()) v += 4.2;
    CHECK(el_residual(shifted, m, 1.5, e) == doctest::Approx(r0).epsilon(1e-10));
}

TEST_CASE("minimize: descent, bounds, far field on a coarse dipole grid") {
    Exponent e(4.0, 2);
    SolverConfig cfg;
    cfg.tol_stop = 1e-12;
    std::vector<double> history;
    cfg.energy_history = &history;
    ExtremalResult er = minimize(dipole_2d(), e, GridSpec{3.0, 25}, cfg);

    CHECK(er.multiplier == doctest::Approx(er.energy));
    CHECK(er.cstar_estimate ==
          doctest::Approx(er.seminorm_value / std::pow(er.energy, 0.25)).epsilon(1e-12));
    for (std::size_t i = 0; i + 1 < history.size(); ++i)
        CHECK(history[i + 1] <= history[i] * (1.0 + 1e-12));
    CHECK(er.el_residual < 1e-4);

    BoundsReport bounds = check_bounds(er.field, dipole_2d());
    CHECK(bounds.pass(1e-3));
    CHECK(bounds.range > 0.0);

    FarfieldReport far = farfield_check(er.field, dipole_2d());
    CHECK(far.two_atom);
    // the spread is truncation-limited (the p = 4 dipole tail decays like
    // r^{-1/3}); the antisymmetric mean converges much faster
    CHECK(far.mean_deviation < 0.05 * far.range);
}

TEST_CASE("minimize agrees with the dense Newton oracle on an 11x11 grid") {
    Exponent e(4.0, 2);
    SolverConfig cfg;
    cfg.tol_stop = 1e-15;
    cfg.stop_window = 200;
    cfg.run_seminorm_search = false;
    ExtremalResult er = minimize(dipole_2d(), e, GridSpec{6.0, 11}, cfg);
    morrey::testing::NewtonOracleResult oracle =
        morrey::testing::newton_constrained_minimum(dipole_2d(), 4.0, 6.0, 11);
    CHECK(std::abs(er.energy - oracle.energy) < 1e-8);
}

TEST_CASE("independent random initializations agree after normalization") {
    Exponent e(4.0, 2);
    SolverConfig a;
    a.random_init = true;
    a.seed = 1;
    a.tol_stop = 1e-13;
    a.run_seminorm_search = false;
    SolverConfig b = a;
    b.seed = 2;
    ExtremalResult ua = minimize(dipole_2d(), e, GridSpec{3.0, 21}, a);
    ExtremalResult ub = minimize(dipole_2d(), e, GridSpec{3.0, 21}, b);
    auto normalize = [](std::vector<double> v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        for (double& x : v) x -= mean;
        return v;
    };
    std::vector<double> va = normalize(ua.field.values());
    std::vector<double> vb = normalize(ub.field.values());
    double sup = 0.0;
    for (std::size_t k = 0; k < va.size(); ++k) sup = std::max(sup, std::abs(va[k] - vb[k]));
    CHECK(sup < 1e-4);
}

TEST_CASE("bounds check flags an interior spike") {
    Exponent e(4.0, 2);
    SolverConfig cfg;
    cfg.run_seminorm_search = false;
    ExtremalResult er = minimize(dipole_2d(), e, GridSpec{3.0, 15}, cfg);
    BoundsReport good = check_bounds(er.field, dipole_2d());
    CHECK(good.pass(1e-2));
    GridField spiked = er.field;
    spiked.values()[spiked.index(2, 12)] = good.global_max + 0.5 * good.range;
    BoundsReport bad = check_bounds(spiked, dipole_2d());
    CHECK_FALSE(bad.pass(1e-2));

    GridField flat(2, 3.0, 15);
    BoundsReport fl = check_bounds(flat, dipole_2d());
    CHECK(fl.upper_slack == 0.0);
    CHECK(fl.lower_slack == 0.0);
}

TEST_CASE("far-field spread shrinks when the box grows at fixed spacing") {
    Exponent e(4.0, 2);
    SolverConfig cfg;
    cfg.tol_stop = 1e-12;
    cfg.run_seminorm_search = false;
    ExtremalResult small = minimize(dipole_2d(), e, GridSpec{3.0, 25}, cfg);
    ExtremalResult big = minimize(dipole_2d(), e, GridSpec{6.0, 49}, cfg);
    FarfieldReport fs = farfield_check(small.field, dipole_2d());
    FarfieldReport fb = farfield_check(big.field, dipole_2d());
    CHECK(fb.spread / fb.range < fs.spread / fs.range);
}

TEST_CASE("constant far-field report is flat") {
    GridField flat(2, 3.0, 9);
    for (double& v : flat.values()) v = 1.0;
    FarfieldReport r = farfield_check(flat, dipole_2d());
    CHECK(r.spread == 0.0);
}

TEST_CASE("solver error paths") {
    Exponent e(4.0, 2);
    SolverConfig cfg;
    cfg.max_iterations = 3;
    cfg.run_seminorm_search = false;
    CHECK_THROWS_AS(minimize(dipole_2d(), e, GridSpec{3.0, 15}, cfg), SolverError);
    CHECK_THROWS_AS(minimize(dipole_2d(), Exponent(4.0, 2), GridSpec{0.5, 15}, SolverConfig{}),
                    ValidationError);  // atoms outside the box
}
