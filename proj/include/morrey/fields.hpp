#pragma once

#include <random>
#include <vector>

#include "morrey/errors.hpp"
#include "morrey/geometry.hpp"
#include "morrey/measure.hpp"

namespace morrey {

// Evaluatable function u: R^n -> R. Fields extend to the whole space
// (piecewise functions through constant tails, grid fields through their
// far-field mode), so similarity searches may probe anywhere.
class ScalarField {
public:
    virtual ~ScalarField() = default;
    virtual double value(const Vec& x) const = 0;
    virtual int dim() const = 0;
    // Bounding box of the interesting part; used for search defaults.
    virtual Box region() const = 0;
    // False where evaluation would leave the field's native domain.
    virtual bool defined_at(const Vec&) const { return true; }
};

// 1D step function with value 0 on both unbounded tails. Value on
// [x_i, x_{i+1}) is values[i] (right-continuous).
class PiecewiseConstant {
public:
    PiecewiseConstant(std::vector<double> breakpoints, std::vector<double> values);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }

    double value(double x) const;
    // integral of |F|^q over the line (exact interval sums)
    double q_norm_pow(double q) const;
    PiecewiseConstant scaled(double t) const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

// Continuous piecewise-linear function on R, constant on both tails, so
// its derivative is compactly supported and all p-norms are exact sums.
class PiecewiseLinear : public ScalarField {
public:
    PiecewiseLinear(std::vector<double> breakpoints, std::vector<double> node_values);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& node_values() const { return nodes_; }

    double value(double x) const;
    double value(const Vec& x) const override { return value(x[0]); }
    int dim() const override { return 1; }
    Box region() const override { return Box{Vec{breakpoints_.front()}, Vec{breakpoints_.back()}}; }

    double slope(std::size_t i) const {
        return (nodes_[i + 1] - nodes_[i]) / (breakpoints_[i + 1] - breakpoints_[i]);
    }
    PiecewiseConstant derivative() const;

    // integral of |u'|^p (exact interval sums)
    double grad_pnorm_pow(double p) const;

    double left_tail() const { return nodes_.front(); }
    double right_tail() const { return nodes_.back(); }

    // x -> f(a x + b), a != 0
    PiecewiseLinear precompose_affine(double a, double b) const;
    PiecewiseLinear scaled(double t) const;
    PiecewiseLinear shifted(double c) const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> nodes_;
};

// a*f + b*g on the merged breakpoint set
PiecewiseLinear combine(double a, const PiecewiseLinear& f, double b, const PiecewiseLinear& g);

std::vector<double> merged_breakpoints(const std::vector<double>& a, const std::vector<double>& b);

// Uniform nodal grid on [-L, L]^n, n in {2, 3}, with multilinear
// evaluation inside the box. Outside, Clamp mode continues the nearest
// boundary value (far fields of extremals are flat); Strict mode refuses.
class GridField : public ScalarField {
public:
    enum class FarField { Clamp, Strict };

    GridField(int dim, double half_width, int resolution, FarField mode = FarField::Clamp);
    GridField(int dim, double half_width, int resolution, std::vector<double> values,
              FarField mode = FarField::Clamp);

    int dim() const override { return dim_; }
    double half_width() const { return half_width_; }
    int resolution() const { return m_; }
    double spacing() const { return h_; }
    std::size_t node_count() const { return values_.size(); }
    Box region() const override;

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    std::size_t index(int i, int j, int k = 0) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(m_) * (static_cast<std::size_t>(j) +
                                               static_cast<std::size_t>(m_) * static_cast<std::size_t>(k));
    }
    Vec node(int i, int j, int k = 0) const;

    bool contains(const Vec& x) const;
    // Native domain is the box even in Clamp mode; integrate() refuses
    // atoms off the grid while searches may still probe clamped values.
    bool defined_at(const Vec& x) const override { return contains(x); }
    double value(const Vec& x) const override;

    FarField farfield_mode() const { return mode_; }

private:
    int dim_;
    double half_width_;
    int m_;
    double h_;
    FarField mode_;
    std::vector<double> values_;
};

// sum_i w_i u(y_i); throws AtomOutsideFieldDomain when an atom leaves the
// field's native domain (grid fields evaluated outside their box).
double integrate(const ScalarField& u, const SignedMeasure& rho);

// Random test field: `segments` linear pieces over [lo, hi] with node
// values uniform in [-amplitude, amplitude].
PiecewiseLinear random_piecewise_linear(std::mt19937_64& rng, double lo, double hi, int segments,
                                        double amplitude);

}  // namespace morrey
