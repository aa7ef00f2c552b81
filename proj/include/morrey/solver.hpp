#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "morrey/fields.hpp"
#include "morrey/measure.hpp"
#include "morrey/seminorm.hpp"

namespace morrey {

struct GridSpec {
    double half_width = 6.0;
    int resolution = 97;
};

struct SolverConfig {
    double tol_stop = 1e-10;        // relative energy decrease over the window
    int stop_window = 100;          // iterations per stagnation check
    long max_iterations = 200000;
    long descent_iterations = 1500; // BB sweep before the Newton refinement
    int cg_max = 500;               // CG cap per Newton step
    int jacobi_sweeps = 5;          // smoothing of the splatted initializer
    int max_backtracks = 40;
    bool random_init = false;
    std::uint64_t seed = 0;
    bool run_seminorm_search = true;
    // Optional observer of the per-iteration (normalized) energies.
    std::vector<double>* energy_history = nullptr;
};

// Discretization of the pairing u -> integral u d(mu): multilinear
// interpolation weights per atom, merged onto grid nodes. Weights sum to
// each atom's weight exactly.
class Splat {
public:
    Splat(const SignedMeasure& mu, const GridField& grid);

    const std::vector<std::pair<std::size_t, double>>& weights() const { return weights_; }
    double pair(const std::vector<double>& values) const;
    std::vector<std::size_t> support_nodes() const;

private:
    std::vector<std::pair<std::size_t, double>> weights_;
};

inline Splat splat(const SignedMeasure& mu, const GridField& grid) { return Splat(mu, grid); }

// Discrete p-Dirichlet energy: sum over cells of h^n |forward-difference
// gradient|^p. One gradient vector per cell keeps the functional convex in
// the nodal values.
double energy(const GridField& u, const Exponent& e);
GridField energy_gradient(const GridField& u, const Exponent& e);
void energy_and_gradient(const GridField& u, const Exponent& e, double& value,
                         std::vector<double>& grad);

// Max over the nodal test basis of |sum_cells h^n |Du|^{p-2} Du . Dphi -
// c <m_h, phi>| divided by |c|.
double el_residual(const GridField& u, const Splat& m, double c, const Exponent& e);

struct ExtremalResult {
    GridField field;
    double multiplier = 0.0;     // c in -div(|Du|^{p-2} Du) = c mu
    double energy = 0.0;         // ||Du||_p^p
    double seminorm_value = 0.0;
    double cstar_estimate = 0.0; // seminorm_value / energy^{1/p}
    Similarity maximizer;
    long iterations = 0;
    double el_residual = 0.0;
};

// Minimize the discrete energy over fields with <m_h, u> = 1 by descent on
// the scale-invariant quotient E(u)/<m_h,u>^p, rescaling after every step.
ExtremalResult minimize(const SignedMeasure& mu, const Exponent& e, const GridSpec& grid_spec,
                        const SolverConfig& cfg,
                        const std::optional<SearchConfig>& search = std::nullopt);

struct BoundsReport {
    double global_min = 0.0, global_max = 0.0;
    double support_min = 0.0, support_max = 0.0;
    double range = 0.0;
    double upper_slack = 0.0;  // global_max - support_max
    double lower_slack = 0.0;  // support_min - global_min
    bool pass(double tol_rel) const {
        double tol = tol_rel * range;
        return upper_slack <= tol && lower_slack <= tol;
    }
};
BoundsReport check_bounds(const GridField& u, const SignedMeasure& mu);

struct FarfieldReport {
    double spread = 0.0;          // max - min of u over the boundary shell
    double boundary_mean = 0.0;
    double range = 0.0;           // global max - min
    bool two_atom = false;
    double midpoint_value = 0.0;  // (u(x0)+u(y0))/2 when two_atom
    double mean_deviation = 0.0;  // |boundary_mean - midpoint_value|
};
FarfieldReport farfield_check(const GridField& u, const SignedMeasure& mu);

}  // namespace morrey
