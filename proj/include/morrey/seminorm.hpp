#pragma once

#include <span>
#include <vector>

#include "morrey/fields.hpp"
#include "morrey/measure.hpp"

namespace morrey {

// Ratio defining the seminorm at a fixed similarity S, in the simplified
// form lambda^{n/p-1} |sum_i w_i u(S(y_i))| / |sum_i w_i y_i|^{1-n/p}.
double ratio(const ScalarField& u, const SignedMeasure& rho, const Similarity& s,
             const Exponent& e);

struct SearchConfig {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    int lambda_count = 33;
    Box z_box;
    int z_count = 9;              // samples per axis
    int orientation_count = 0;    // 0 = dimension default (n=2: 16, n=3: 60)
    bool reflections = true;
    int polish_iterations = 200;
    double polish_tol = 1e-10;
    int polish_starts = 8;
    bool record_trace = true;

    // Scales derived from the field's region of interest and the measure's
    // support diameter; lambda spans [0.01, 100] * D / diam(supp rho).
    static SearchConfig defaults(const ScalarField& u, const SignedMeasure& rho);
};

struct TraceEntry {
    Similarity similarity;
    double ratio;
};

struct SeminormResult {
    double value = 0.0;
    Similarity argmax;
    double ratio_at_argmax = 0.0;
    std::vector<TraceEntry> trace;
};

// Multistart grid over (lambda, O, z) followed by simplex polish of the
// best starts. The returned value is a certified lower bound on [u]_rho.
SeminormResult seminorm(const ScalarField& u, const SignedMeasure& rho, const Exponent& e,
                        const SearchConfig& cfg);

// Comparison constant A = sum |w_i| |y_i|^{1-n/p} / |moment|^{1-n/p}.
double comparison_constant(const SignedMeasure& rho, const Exponent& e);

// Sampled Holder seminorm: max over point pairs of |u(x)-u(y)|/|x-y|^{1-n/p}.
double holder_seminorm(const ScalarField& u, const Exponent& e, std::span<const Vec> samples);

// Uniform grid of sample points over the field's region.
std::vector<Vec> holder_default_samples(const ScalarField& u, int per_axis);

}  // namespace morrey
