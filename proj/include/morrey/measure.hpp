#pragma once

#include <vector>

#include "morrey/errors.hpp"
#include "morrey/geometry.hpp"

namespace morrey {

// Exponent pair (p, n) with p > n, plus the Holder conjugate q = p/(p-1).
class Exponent {
public:
    Exponent(double p, int n);

    double p() const { return p_; }
    int n() const { return n_; }
    double q() const { return q_; }

    // Holder exponent 1 - n/p of the seminorm scale.
    double alpha() const { return 1.0 - static_cast<double>(n_) / p_; }

private:
    double p_;
    int n_;
    double q_;
};

struct Atom {
    Vec location;
    double weight;
};

// Finite signed atomic measure with zero total mass and nonzero first
// moment. Construction merges coincident atoms and validates the
// invariants; instances are immutable afterwards.
class SignedMeasure {
public:
    const std::vector<Atom>& atoms() const { return atoms_; }
    int dim() const { return atoms_.front().location.dim(); }
    std::size_t size() const { return atoms_.size(); }

    double support_radius() const { return support_radius_; }
    double support_diameter() const { return support_diameter_; }
    double total_abs_weight() const { return total_abs_weight_; }
    const Vec& moment() const { return moment_; }

    Box support_box() const;

    friend SignedMeasure validate_measure(std::vector<Atom> atoms);

private:
    explicit SignedMeasure(std::vector<Atom> atoms);

    std::vector<Atom> atoms_;
    double support_radius_ = 0.0;
    double support_diameter_ = 0.0;
    double total_abs_weight_ = 0.0;
    Vec moment_;
};

SignedMeasure validate_measure(std::vector<Atom> atoms);
Vec first_moment(const SignedMeasure& rho);

// Similarity transformation S(y) = lambda * O * y + z with lambda > 0 and
// O orthogonal. O is re-orthonormalized at construction when its defect is
// below 1e-8 and rejected otherwise.
class Similarity {
public:
    Similarity(double scale, Mat orthogonal, Vec shift);

    static Similarity identity(int dim);
    // n = 1: O = sign
    static Similarity line(double scale, double sign, double shift);
    // n = 2: rotation by theta, optionally composed with the reflection
    // (x, y) -> (x, -y) applied first.
    static Similarity planar(double scale, double theta, bool reflect, const Vec& shift);
    // n = 3: rotation about axis by angle (Rodrigues), optional reflection
    // z -> -z applied first.
    static Similarity spatial(double scale, const Vec& axis, double angle, bool reflect,
                              const Vec& shift);

    int dim() const { return shift_.dim(); }
    double scale() const { return scale_; }
    const Mat& orthogonal() const { return orthogonal_; }
    const Vec& shift() const { return shift_; }

    Vec apply(const Vec& y) const { return orthogonal_ * y * scale_ + shift_; }
    Similarity inverse() const;

private:
    double scale_;
    Mat orthogonal_;
    Vec shift_;
};

// compose(S, T)(y) = S(T(y))
Similarity compose(const Similarity& outer, const Similarity& inner);

SignedMeasure pushforward(const Similarity& s, const SignedMeasure& rho);

// Orthonormal factor for n = 2 rotations used by search charts.
Mat rotation_2d(double theta, bool reflect);
Mat rotation_3d(const Vec& axis, double angle, bool reflect);

}  // namespace morrey
