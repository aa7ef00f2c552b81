#include "morrey/measure.hpp"

#include <algorithm>
#include <cmath>

#include "morrey/config.hpp"

namespace morrey {

Exponent::Exponent(double p, int n) : p_(p), n_(n) {
    if (n < 1 || n > 3)
        throw ValidationError(ErrorCode::InvalidExponent, "dimension must be 1, 2 or 3");
    if (!(p > static_cast<double>(n)))
        throw ValidationError(ErrorCode::InvalidExponent, "p must exceed the dimension n");
    q_ = p / (p - 1.0);
}

namespace {

bool location_less(const Vec& a, const Vec& b) {
    for (int i = 0; i < a.dim(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

bool location_equal(const Vec& a, const Vec& b) {
    for (int i = 0; i < a.dim(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

}  // namespace

SignedMeasure::SignedMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    const auto& tol = tolerances();
    int n = atoms_.front().location.dim();

    // Sort for determinism; exact duplicates become adjacent and merge.
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return location_less(a.location, b.location); });
    std::vector<Atom> merged;
    merged.reserve(atoms_.size());
    for (const Atom& a : atoms_) {
        if (a.location.dim() != n)
            throw ValidationError(ErrorCode::InvalidField, "atoms of mixed dimension");
        if (!merged.empty() && location_equal(merged.back().location, a.location))
            merged.back().weight += a.weight;
        else
            merged.push_back(a);
    }
    std::erase_if(merged, [](const Atom& a) { return a.weight == 0.0; });
    if (merged.empty())
        throw ValidationError(ErrorCode::EmptyAfterMerge, "all atoms cancelled during merge");
    atoms_ = std::move(merged);

    double mass = 0.0, max_w = 0.0;
    moment_ = Vec(n);
    for (const Atom& a : atoms_) {
        mass += a.weight;
        max_w = std::max(max_w, std::abs(a.weight));
        total_abs_weight_ += std::abs(a.weight);
        moment_ += a.location * a.weight;
        support_radius_ = std::max(support_radius_, a.location.norm());
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        for (std::size_t j = i + 1; j < atoms_.size(); ++j)
            support_diameter_ =
                std::max(support_diameter_, distance(atoms_[i].location, atoms_[j].location));

    if (std::abs(mass) > tol.exact_abs * max_w)
        throw ValidationError(ErrorCode::ZeroTotalMassViolated, "total mass must vanish");
    if (moment_.norm() <= tol.exact_abs * total_abs_weight_ * std::max(1.0, support_radius_))
        throw ValidationError(ErrorCode::ZeroFirstMoment, "first moment must be nonzero");
}

Box SignedMeasure::support_box() const {
    Box b{atoms_.front().location, atoms_.front().location};
    for (const Atom& a : atoms_)
        for (int i = 0; i < dim(); ++i) {
            b.lo[i] = std::min(b.lo[i], a.location[i]);
            b.hi[i] = std::max(b.hi[i], a.location[i]);
        }
    return b;
}

SignedMeasure validate_measure(std::vector<Atom> atoms) {
    if (atoms.empty())
        throw ValidationError(ErrorCode::EmptyAfterMerge, "atom list is empty");
    return SignedMeasure(std::move(atoms));
}

Vec first_moment(const SignedMeasure& rho) { return rho.moment(); }

namespace {

// Modified Gram-Schmidt on the rows; enough to absorb 1e-8 defects.
Mat reorthonormalize(const Mat& m) {
    int n = m.dim();
    Mat r = m;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < i; ++k) {
            double d = 0.0;
            for (int j = 0; j < n; ++j) d += r(i, j) * r(k, j);
            for (int j = 0; j < n; ++j) r(i, j) -= d * r(k, j);
        }
        double nrm = 0.0;
        for (int j = 0; j < n; ++j) nrm += r(i, j) * r(i, j);
        nrm = std::sqrt(nrm);
        if (nrm == 0.0)
            throw ValidationError(ErrorCode::InvalidSimilarity, "degenerate orthogonal factor");
        for (int j = 0; j < n; ++j) r(i, j) /= nrm;
    }
    return r;
}

}  // namespace

Similarity::Similarity(double scale, Mat orthogonal, Vec shift)
    : scale_(scale), orthogonal_(orthogonal), shift_(shift) {
    if (!(scale > 0.0))
        throw ValidationError(ErrorCode::InvalidSimilarity, "scale must be positive");
    if (orthogonal_.dim() != shift_.dim())
        throw ValidationError(ErrorCode::InvalidSimilarity, "dimension mismatch");
    double defect = orthogonal_.orthogonality_defect();
    if (defect > 1e-8)
        throw ValidationError(ErrorCode::InvalidSimilarity, "matrix is not orthogonal");
    if (defect > tolerances().exact_abs) {
        orthogonal_ = reorthonormalize(orthogonal_);
        if (orthogonal_.orthogonality_defect() > tolerances().exact_abs)
            throw ValidationError(ErrorCode::InvalidSimilarity, "re-orthonormalization failed");
    }
}

Similarity Similarity::identity(int dim) { return Similarity(1.0, Mat::identity(dim), Vec(dim)); }

Similarity Similarity::line(double scale, double sign, double shift) {
    Mat o(1);
    o(0, 0) = sign >= 0.0 ? 1.0 : -1.0;
    return Similarity(scale, o, Vec{shift});
}

Mat rotation_2d(double theta, bool reflect) {
    Mat o(2);
    double c = std::cos(theta), s = std::sin(theta);
    // rotation times optional reflection (x, y) -> (x, -y)
    o(0, 0) = c;
    o(0, 1) = reflect ? s : -s;
    o(1, 0) = s;
    o(1, 1) = reflect ? -c : c;
    return o;
}

Mat rotation_3d(const Vec& axis, double angle, bool reflect) {
    Vec a = axis;
    double nrm = a.norm();
    if (nrm == 0.0) {
        a = Vec{0.0, 0.0, 1.0};
        nrm = 1.0;
    }
    a = a * (1.0 / nrm);
    double c = std::cos(angle), s = std::sin(angle), omc = 1.0 - c;
    Mat r(3);
    r(0, 0) = c + a[0] * a[0] * omc;
    r(0, 1) = a[0] * a[1] * omc - a[2] * s;
    r(0, 2) = a[0] * a[2] * omc + a[1] * s;
    r(1, 0) = a[1] * a[0] * omc + a[2] * s;
    r(1, 1) = c + a[1] * a[1] * omc;
    r(1, 2) = a[1] * a[2] * omc - a[0] * s;
    r(2, 0) = a[2] * a[0] * omc - a[1] * s;
    r(2, 1) = a[2] * a[1] * omc + a[0] * s;
    r(2, 2) = c + a[2] * a[2] * omc;
    if (reflect) {
        // compose with z -> -z applied first
        for (int i = 0; i < 3; ++i) r(i, 2) = -r(i, 2);
    }
    return r;
}

Similarity Similarity::planar(double scale, double theta, bool reflect, const Vec& shift) {
    return Similarity(scale, rotation_2d(theta, reflect), shift);
}

Similarity Similarity::spatial(double scale, const Vec& axis, double angle, bool reflect,
                               const Vec& shift) {
    return Similarity(scale, rotation_3d(axis, angle, reflect), shift);
}

Similarity Similarity::inverse() const {
    Mat ot = orthogonal_.transposed();
    Vec z = ot * shift_ * (-1.0 / scale_);
    return Similarity(1.0 / scale_, ot, z);
}

Similarity compose(const Similarity& outer, const Similarity& inner) {
    if (outer.dim() != inner.dim())
        throw ValidationError(ErrorCode::InvalidSimilarity, "dimension mismatch in compose");
    Mat o = outer.orthogonal() * inner.orthogonal();
    Vec z = outer.orthogonal() * inner.shift() * outer.scale() + outer.shift();
    return Similarity(outer.scale() * inner.scale(), o, z);
}

SignedMeasure pushforward(const Similarity& s, const SignedMeasure& rho) {
    if (s.dim() != rho.dim())
        throw ValidationError(ErrorCode::InvalidSimilarity, "dimension mismatch in pushforward");
    std::vector<Atom> atoms;
    atoms.reserve(rho.size());
    for (const Atom& a : rho.atoms()) atoms.push_back({s.apply(a.location), a.weight});
    return validate_measure(std::move(atoms));
}

}  // namespace morrey
