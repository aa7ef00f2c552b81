#pragma once

#include <span>
#include <utility>
#include <vector>

#include "morrey/fields.hpp"
#include "morrey/measure.hpp"

namespace morrey {

// Distribution function F(x) = rho((-inf, x]) of a 1D measure; a step
// function vanishing outside the support interval.
PiecewiseConstant distribution_function(const SignedMeasure& rho);

// Closed-form extremal v(x) = -integral of |F|^{q-2} F up to x. Slope on
// interval i is -sign(F_i) |F_i|^{q-1}; v == 0 left of the support.
PiecewiseLinear extremal_1d(const SignedMeasure& rho, const Exponent& e);

// Sharp constant (integral |F|^q)^{1/q} / |moment|^{1/q}, exact interval sums.
double best_constant_1d(const SignedMeasure& rho, const Exponent& e);

// Shared with the duality certificate so both routes agree bit-for-bit.
double cstar_from_flux_qnorm_pow(double flux_qnorm_pow, const SignedMeasure& rho,
                                 const Exponent& e);

struct FarfieldLimits {
    double left;
    double right;
};
FarfieldLimits farfield_limits_1d(const PiecewiseLinear& v);

// Max over the test family of |integral |v'|^{p-2} v' phi' dx - sum w_i phi(y_i)|.
double weak_residual_1d(const PiecewiseLinear& v, const SignedMeasure& rho, const Exponent& e,
                        std::span<const PiecewiseLinear> tests);

// Hat centered at c with support [c - width, c + width] and peak 1.
PiecewiseLinear hat_function(double center, double width);

// One hat per atom, widths half the gap to the nearest neighbour.
std::vector<PiecewiseLinear> hat_tests_at_atoms(const SignedMeasure& rho);

// `count` hats with centers equally spaced in [lo, hi].
std::vector<PiecewiseLinear> hat_tests_uniform(double lo, double hi, int count);

// integral of |u'|^{p-2} u' phi' dx over the line, exact on the merged
// breakpoint set (both derivatives are piecewise constant).
double plaplace_pairing_1d(const PiecewiseLinear& u, const PiecewiseLinear& phi, double p);

}  // namespace morrey
