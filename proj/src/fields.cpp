#include "morrey/fields.hpp"

#include <algorithm>
#include <cmath>

namespace morrey {

PiecewiseConstant::PiecewiseConstant(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (breakpoints_.empty() || values_.size() + 1 != breakpoints_.size())
        throw ValidationError(ErrorCode::InvalidField, "piecewise-constant sizes inconsistent");
    if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end()))
        throw ValidationError(ErrorCode::InvalidField, "breakpoints must be sorted");
}

double PiecewiseConstant::value(double x) const {
    if (x < breakpoints_.front() || x >= breakpoints_.back()) return 0.0;
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return values_[i];
}

double PiecewiseConstant::q_norm_pow(double q) const {
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        s += pow_abs_times(values_[i], q, breakpoints_[i + 1] - breakpoints_[i]);
    return s;
}

PiecewiseConstant PiecewiseConstant::scaled(double t) const {
    std::vector<double> v = values_;
    for (double& x : v) x *= t;
    return PiecewiseConstant(breakpoints_, std::move(v));
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> breakpoints, std::vector<double> node_values)
    : breakpoints_(std::move(breakpoints)), nodes_(std::move(node_values)) {
    if (breakpoints_.empty() || breakpoints_.size() != nodes_.size())
        throw ValidationError(ErrorCode::InvalidField, "piecewise-linear sizes inconsistent");
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
        if (!(breakpoints_[i] < breakpoints_[i + 1]))
            throw ValidationError(ErrorCode::InvalidField, "breakpoints must be strictly increasing");
}

double PiecewiseLinear::value(double x) const {
    if (x <= breakpoints_.front()) return nodes_.front();
    if (x >= breakpoints_.back()) return nodes_.back();
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    double t = (x - breakpoints_[i]) / (breakpoints_[i + 1] - breakpoints_[i]);
    return nodes_[i] + t * (nodes_[i + 1] - nodes_[i]);
}

PiecewiseConstant PiecewiseLinear::derivative() const {
    if (breakpoints_.size() == 1) return PiecewiseConstant({breakpoints_[0]}, {});
    std::vector<double> v(breakpoints_.size() - 1);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = slope(i);
    return PiecewiseConstant(breakpoints_, std::move(v));
}

double PiecewiseLinear::grad_pnorm_pow(double p) const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
        s += pow_abs_times(slope(i), p, breakpoints_[i + 1] - breakpoints_[i]);
    return s;
}

PiecewiseLinear PiecewiseLinear::precompose_affine(double a, double b) const {
    if (a == 0.0)
        throw ValidationError(ErrorCode::InvalidField, "affine precompose needs a != 0");
    std::size_t k = breakpoints_.size();
    std::vector<double> bp(k), nv(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = a > 0.0 ? i : k - 1 - i;
        bp[i] = (breakpoints_[j] - b) / a;
        nv[i] = nodes_[j];
    }
    return PiecewiseLinear(std::move(bp), std::move(nv));
}

PiecewiseLinear PiecewiseLinear::scaled(double t) const {
    std::vector<double> v = nodes_;
    for (double& x : v) x *= t;
    return PiecewiseLinear(breakpoints_, std::move(v));
}

PiecewiseLinear PiecewiseLinear::shifted(double c) const {
    std::vector<double> v = nodes_;
    for (double& x : v) x += c;
    return PiecewiseLinear(breakpoints_, std::move(v));
}

std::vector<double> merged_breakpoints(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> m;
    m.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m));
    m.erase(std::unique(m.begin(), m.end()), m.end());
    return m;
}

PiecewiseLinear combine(double a, const PiecewiseLinear& f, double b, const PiecewiseLinear& g) {
    std::vector<double> bp = merged_breakpoints(f.breakpoints(), g.breakpoints());
    std::vector<double> nv(bp.size());
    for (std::size_t i = 0; i < bp.size(); ++i) nv[i] = a * f.value(bp[i]) + b * g.value(bp[i]);
    return PiecewiseLinear(std::move(bp), std::move(nv));
}

namespace {

std::size_t node_total(int dim, int resolution) {
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(resolution);
    return total;
}

}  // namespace

GridField::GridField(int dim, double half_width, int resolution, FarField mode)
    : GridField(dim, half_width, resolution, std::vector<double>(node_total(dim, resolution), 0.0),
                mode) {}

GridField::GridField(int dim, double half_width, int resolution, std::vector<double> values,
                     FarField mode)
    : dim_(dim), half_width_(half_width), m_(resolution), mode_(mode), values_(std::move(values)) {
    if (dim_ < 2 || dim_ > 3)
        throw ValidationError(ErrorCode::InvalidField, "grid fields are for n = 2 or 3");
    if (m_ < 3) throw ValidationError(ErrorCode::InvalidField, "resolution must be at least 3");
    if (!(half_width_ > 0.0))
        throw ValidationError(ErrorCode::InvalidField, "box half-width must be positive");
    std::size_t expected = 1;
    for (int d = 0; d < dim_; ++d) expected *= static_cast<std::size_t>(m_);
    if (values_.size() != expected)
        throw ValidationError(ErrorCode::InvalidField, "value count does not match resolution");
    for (double v : values_)
        if (!std::isfinite(v))
            throw ValidationError(ErrorCode::InvalidField, "grid values must be finite");
    h_ = 2.0 * half_width_ / (m_ - 1);
}

Box GridField::region() const {
    return Box{Vec(dim_, -half_width_), Vec(dim_, half_width_)};
}

Vec GridField::node(int i, int j, int k) const {
    Vec x(dim_);
    x[0] = -half_width_ + h_ * i;
    x[1] = -half_width_ + h_ * j;
    if (dim_ == 3) x[2] = -half_width_ + h_ * k;
    return x;
}

bool GridField::contains(const Vec& x) const {
    return region().contains(x, 1e-12 * half_width_);
}

double GridField::value(const Vec& x) const {
    if (x.dim() != dim_)
        throw ValidationError(ErrorCode::InvalidField, "point dimension mismatch");
    if (mode_ == FarField::Strict && !contains(x))
        throw ValidationError(ErrorCode::AtomOutsideFieldDomain,
                              "grid field evaluated outside its box");
    Vec p = region().clamp(x);
    int idx[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int d = 0; d < dim_; ++d) {
        double t = (p[d] + half_width_) / h_;
        int i = static_cast<int>(std::floor(t));
        i = std::clamp(i, 0, m_ - 2);
        idx[d] = i;
        frac[d] = t - i;
    }
    int corners = 1 << dim_;
    double s = 0.0;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        int off[3] = {0, 0, 0};
        for (int d = 0; d < dim_; ++d) {
            int bit = (c >> d) & 1;
            off[d] = bit;
            w *= bit ? frac[d] : 1.0 - frac[d];
        }
        if (w == 0.0) continue;
        s += w * values_[index(idx[0] + off[0], idx[1] + off[1], idx[2] + off[2])];
    }
    return s;
}

double integrate(const ScalarField& u, const SignedMeasure& rho) {
    if (u.dim() != rho.dim())
        throw ValidationError(ErrorCode::InvalidField, "field and measure dimension mismatch");
    double s = 0.0;
    for (const Atom& a : rho.atoms()) {
        if (!u.defined_at(a.location))
            throw ValidationError(ErrorCode::AtomOutsideFieldDomain,
                                  "atom outside the field's domain");
        s += a.weight * u.value(a.location);
    }
    return s;
}

PiecewiseLinear random_piecewise_linear(std::mt19937_64& rng, double lo, double hi, int segments,
                                        double amplitude) {
    std::uniform_real_distribution<double> ux(lo, hi), uv(-amplitude, amplitude);
    std::vector<double> bp;
    bp.reserve(static_cast<std::size_t>(segments) + 1);
    bp.push_back(lo);
    bp.push_back(hi);
    while (bp.size() < static_cast<std::size_t>(segments) + 1) {
        double x = ux(rng);
        bool close = false;
        for (double b : bp) close = close || std::abs(b - x) < 1e-9 * (hi - lo);
        if (!close) bp.push_back(x);
    }
    std::sort(bp.begin(), bp.end());
    std::vector<double> nv(bp.size());
    for (double& v : nv) v = uv(rng);
    return PiecewiseLinear(std::move(bp), std::move(nv));
}

}  // namespace morrey
