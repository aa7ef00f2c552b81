#pragma once

#include <optional>
#include <span>
#include <vector>

#include "morrey/extremal1d.hpp"
#include "morrey/fields.hpp"
#include "morrey/measure.hpp"
#include "morrey/seminorm.hpp"
#include "morrey/solver.hpp"

namespace morrey {

enum class StabilityRegime { HighP, LowP };  // p > 2 vs 1 < p <= 2

struct StabilityReport {
    StabilityRegime regime = StabilityRegime::HighP;
    double lhs = 0.0;    // deficit term plus seminorm power
    double rhs = 0.0;    // C-power times gradient-norm power
    double slack = 0.0;  // rhs - lhs, nonnegative up to tolerance
    double deficit = 0.0;
    double seminorm_value = 0.0;  // ratio of v at the matched similarity
    double matched_extremal_scale = 0.0;
};

// Extremal matched to v: its seminorm ratio is attained at the similarity
// maximizing v's ratio, and its integral against mu = S#rho equals v's.
struct MatchedExtremal1D {
    PiecewiseLinear field;
    Similarity maximizer;
    double ratio = 0.0;  // v's ratio at the maximizer (lower bound on [v]_rho)
    double scale = 0.0;  // multiplier aligning the integrals
};

MatchedExtremal1D matched_extremal_1d(const PiecewiseLinear& v, const SignedMeasure& rho,
                                      const Exponent& e, const SearchConfig& cfg);

// Stability inequality of the two Clarkson regimes, exact 1D arithmetic.
// `force_regime` exists to reject the low-p formula in higher dimensions.
StabilityReport stability_deficit(const PiecewiseLinear& v, const SignedMeasure& rho,
                                  const Exponent& e, double constant,
                                  const MatchedExtremal1D& matched,
                                  std::optional<StabilityRegime> force_regime = std::nullopt);

// Grid-sum variant for n >= 2 (p > 2 regime only); u and v share a grid.
StabilityReport stability_deficit_grid(const GridField& v, const GridField& u, double ratio_v,
                                       const Exponent& e, double constant);

// Flux with div F = rho in the weak sense: F = -(1/c) |Du|^{p-2} Du for an
// extremal pair (u, c). Scale-invariant in the normalization of u.
PiecewiseConstant flux_from_extremal(const PiecewiseLinear& u, double c, const Exponent& e);

struct FluxField {
    int dim = 2;
    double half_width = 0.0;
    int resolution = 0;  // node resolution of the originating grid
    double spacing = 0.0;
    // cell-major, then 2^n corner gradients per cell, dim entries each;
    // every corner sample carries quadrature weight h^n / 2^n
    std::vector<double> components;

    double q_norm_pow(const Exponent& e) const;  // sum of weighted |F_k|^q
    double q_norm(const Exponent& e) const;
};
FluxField flux_from_extremal(const GridField& u, double c, const Exponent& e);

// Weak divergence defect: max over tests of |integral Dphi . F + sum w phi(y)|.
double divergence_residual(const PiecewiseConstant& flux, const SignedMeasure& rho,
                           std::span<const PiecewiseLinear> tests);
double divergence_residual(const FluxField& flux, const SignedMeasure& rho);

struct DualityCertificate {
    double flux_qnorm = 0.0;
    double primal_value = 0.0;  // |integral u drho| / ||Du||_p
    double gap = 0.0;           // flux_qnorm - primal_value
    double moment_factor = 0.0; // |integral y drho|^{1-n/p}
    double cstar = 0.0;         // flux_qnorm / moment_factor
};

// Exact 1D certificate from the distribution-function flux.
DualityCertificate duality_gap(const SignedMeasure& rho, const Exponent& e);
// Grid certificate from a converged extremal.
DualityCertificate duality_gap(const SignedMeasure& rho, const Exponent& e,
                               const ExtremalResult& extremal);

// sup |u - u o T| over samples; requires T#rho = rho.
double check_symmetry(const ScalarField& u, const SignedMeasure& rho, const Similarity& t,
                      std::span<const Vec> samples);
// standard deviation of u + u o T over samples; requires T#rho = -rho.
double check_antisymmetry(const ScalarField& u, const SignedMeasure& rho, const Similarity& t,
                          std::span<const Vec> samples);

// Grid nodes whose image under T stays inside the grid box.
std::vector<Vec> symmetry_samples(const GridField& u, const Similarity& t);
// Uniform 1D samples over the union of the region and its T-image.
std::vector<Vec> symmetry_samples_1d(const PiecewiseLinear& u, const Similarity& t, int count);

// Reflection swapping x0 and y0, fixing their midpoint hyperplane.
Similarity midpoint_reflection(const Vec& x0, const Vec& y0);
// Orthogonal maps about x0 fixing the direction y0 - x0.
std::vector<Similarity> axial_rotations(const Vec& x0, const Vec& y0, int count);

}  // namespace morrey
