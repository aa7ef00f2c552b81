#include "morrey/extremal1d.hpp"

#include <algorithm>
#include <cmath>

namespace morrey {

namespace {

void require_1d(const SignedMeasure& rho) {
    if (rho.dim() != 1)
        throw ValidationError(ErrorCode::DimensionNotOne, "operation requires a 1D measure");
}

}  // namespace

PiecewiseConstant distribution_function(const SignedMeasure& rho) {
    require_1d(rho);
    // Atoms are sorted at construction; cumulative sums give the values
    // between consecutive atoms. Tails are identically zero by
    // representation, which absorbs the rounding residue of the total mass.
    std::vector<double> bp;
    bp.reserve(rho.size());
    for (const Atom& a : rho.atoms()) bp.push_back(a.location[0]);
    std::vector<double> vals;
    vals.reserve(rho.size() - 1);
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < rho.size(); ++i) {
        cum += rho.atoms()[i].weight;
        vals.push_back(cum);
    }
    return PiecewiseConstant(std::move(bp), std::move(vals));
}

PiecewiseLinear extremal_1d(const SignedMeasure& rho, const Exponent& e) {
    require_1d(rho);
    PiecewiseConstant f = distribution_function(rho);
    const auto& bp = f.breakpoints();
    std::vector<double> nodes(bp.size(), 0.0);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        double slope = -signed_pow(f.values()[i], e.q() - 1.0);
        nodes[i + 1] = nodes[i] + slope * (bp[i + 1] - bp[i]);
    }
    return PiecewiseLinear(bp, std::move(nodes));
}

double cstar_from_flux_qnorm_pow(double flux_qnorm_pow, const SignedMeasure& rho,
                                 const Exponent& e) {
    double m = rho.moment().norm();
    return std::pow(flux_qnorm_pow, 1.0 / e.q()) / std::pow(m, e.alpha());
}

double best_constant_1d(const SignedMeasure& rho, const Exponent& e) {
    require_1d(rho);
    return cstar_from_flux_qnorm_pow(distribution_function(rho).q_norm_pow(e.q()), rho, e);
}

FarfieldLimits farfield_limits_1d(const PiecewiseLinear& v) {
    return {v.left_tail(), v.right_tail()};
}

double plaplace_pairing_1d(const PiecewiseLinear& u, const PiecewiseLinear& phi, double p) {
    std::vector<double> bp = merged_breakpoints(u.breakpoints(), phi.breakpoints());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        double dx = bp[i + 1] - bp[i];
        double su = (u.value(bp[i + 1]) - u.value(bp[i])) / dx;
        double sp = (phi.value(bp[i + 1]) - phi.value(bp[i])) / dx;
        if (su == 0.0 || sp == 0.0) continue;
        s += signed_pow(su, p - 1.0) * sp * dx;
    }
    return s;
}

double weak_residual_1d(const PiecewiseLinear& v, const SignedMeasure& rho, const Exponent& e,
                        std::span<const PiecewiseLinear> tests) {
    require_1d(rho);
    double worst = 0.0;
    for (const PiecewiseLinear& phi : tests) {
        double lhs = plaplace_pairing_1d(v, phi, e.p());
        double rhs = integrate(phi, rho);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

PiecewiseLinear hat_function(double center, double width) {
    if (!(width > 0.0))
        throw ValidationError(ErrorCode::InvalidField, "hat width must be positive");
    return PiecewiseLinear({center - width, center, center + width}, {0.0, 1.0, 0.0});
}

std::vector<PiecewiseLinear> hat_tests_at_atoms(const SignedMeasure& rho) {
    require_1d(rho);
    std::vector<double> locs;
    for (const Atom& a : rho.atoms()) locs.push_back(a.location[0]);
    std::vector<PiecewiseLinear> tests;
    tests.reserve(locs.size());
    for (std::size_t i = 0; i < locs.size(); ++i) {
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < locs.size(); ++j)
            if (j != i) gap = std::min(gap, std::abs(locs[j] - locs[i]));
        if (!std::isfinite(gap)) gap = std::max(1.0, rho.support_radius());
        tests.push_back(hat_function(locs[i], 0.5 * gap));
    }
    return tests;
}

std::vector<PiecewiseLinear> hat_tests_uniform(double lo, double hi, int count) {
    if (count < 1 || !(hi > lo))
        throw ValidationError(ErrorCode::InvalidField, "bad uniform hat family");
    std::vector<PiecewiseLinear> tests;
    tests.reserve(static_cast<std::size_t>(count));
    double step = (hi - lo) / (count + 1);
    for (int k = 1; k <= count; ++k) tests.push_back(hat_function(lo + step * k, step));
    return tests;
}

}  // namespace morrey
