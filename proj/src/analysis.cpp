#include "morrey/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace morrey {

MatchedExtremal1D matched_extremal_1d(const PiecewiseLinear& v, const SignedMeasure& rho,
                                      const Exponent& e, const SearchConfig& cfg) {
    if (rho.dim() != 1)
        throw ValidationError(ErrorCode::DimensionNotOne, "matched extremal path is 1D");
    SeminormResult sr = seminorm(v, rho, e, cfg);
    const Similarity& s = sr.argmax;

    // Transport the canonical extremal so its ratio is attained at S#rho,
    // then align the integrals against mu = S#rho.
    PiecewiseLinear base = extremal_1d(rho, e);
    double o = s.orthogonal()(0, 0);
    double a = o / s.scale();
    double b = -o * s.shift()[0] / s.scale();
    PiecewiseLinear u = base.precompose_affine(a, b).scaled(std::pow(s.scale(), e.alpha()));

    SignedMeasure mu = pushforward(s, rho);
    double iu = integrate(u, mu);
    double iv = integrate(v, mu);
    double t = iu != 0.0 ? iv / iu : 0.0;
    return {u.scaled(t), s, sr.value, t};
}

StabilityReport stability_deficit(const PiecewiseLinear& v, const SignedMeasure& rho,
                                  const Exponent& e, double constant,
                                  const MatchedExtremal1D& matched,
                                  std::optional<StabilityRegime> force_regime) {
    if (rho.dim() != 1)
        throw ValidationError(ErrorCode::DimensionNotOne, "exact stability path is 1D");
    StabilityRegime regime = force_regime.value_or(e.p() > 2.0 ? StabilityRegime::HighP
                                                               : StabilityRegime::LowP);
    if (regime == StabilityRegime::LowP && e.n() >= 2)
        throw ValidationError(ErrorCode::RegimeMismatch,
                              "the 1 < p <= 2 stability regime is one-dimensional");

    const double p = e.p();
    const double r = matched.ratio;
    PiecewiseLinear diff = combine(1.0, matched.field, -1.0, v);
    double diff_pnorm_pow = diff.grad_pnorm_pow(p);
    double v_pnorm_pow = v.grad_pnorm_pow(p);

    StabilityReport rep;
    rep.regime = regime;
    rep.seminorm_value = r;
    rep.matched_extremal_scale = matched.scale;
    if (regime == StabilityRegime::HighP) {
        rep.deficit = std::pow(0.5 * constant, p) * diff_pnorm_pow;
        rep.lhs = rep.deficit + std::pow(r, p);
        rep.rhs = std::pow(constant, p) * v_pnorm_pow;
    } else {
        double ex = p / (p - 1.0);
        rep.deficit = std::pow(0.5 * constant, ex) * std::pow(diff_pnorm_pow, 1.0 / (p - 1.0));
        rep.lhs = rep.deficit + std::pow(r, ex);
        rep.rhs = std::pow(constant, ex) * std::pow(v_pnorm_pow, 1.0 / (p - 1.0));
    }
    rep.slack = rep.rhs - rep.lhs;
    return rep;
}

StabilityReport stability_deficit_grid(const GridField& v, const GridField& u, double ratio_v,
                                       const Exponent& e, double constant) {
    if (!(e.p() > 2.0))
        throw ValidationError(ErrorCode::RegimeMismatch,
                              "grid stability check covers only p > 2");
    if (v.resolution() != u.resolution() || v.half_width() != u.half_width() ||
        v.dim() != u.dim())
        throw ValidationError(ErrorCode::InvalidField, "fields must share a grid");
    GridField diff = v;
    for (std::size_t i = 0; i < diff.values().size(); ++i)
        diff.values()[i] = u.values()[i] - v.values()[i];
    const double p = e.p();
    StabilityReport rep;
    rep.regime = StabilityRegime::HighP;
    rep.seminorm_value = ratio_v;
    rep.matched_extremal_scale = 1.0;
    rep.deficit = std::pow(0.5 * constant, p) * energy(diff, e);
    rep.lhs = rep.deficit + std::pow(ratio_v, p);
    rep.rhs = std::pow(constant, p) * energy(v, e);
    rep.slack = rep.rhs - rep.lhs;
    return rep;
}

PiecewiseConstant flux_from_extremal(const PiecewiseLinear& u, double c, const Exponent& e) {
    if (c == 0.0)
        throw ValidationError(ErrorCode::InvalidField, "flux needs a nonzero multiplier");
    const auto& bp = u.breakpoints();
    std::vector<double> vals(bp.size() > 0 ? bp.size() - 1 : 0, 0.0);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i)
        vals[i] = -signed_pow(u.slope(i), e.p() - 1.0) / c;
    return PiecewiseConstant(bp, std::move(vals));
}

namespace {

// Corner gradients of a cell, matching the solver's discretization: one
// one-sided gradient per corner, built from the incident edge differences.
template <typename F>
void for_cell_corner_gradients(const std::vector<double>& v, int n, int m, double h,
                               std::size_t base, F&& fn) {
    const std::size_t mu = static_cast<std::size_t>(m);
    if (n == 2) {
        double a = v[base], b = v[base + 1], c = v[base + mu], d = v[base + mu + 1];
        double bx = (b - a) / h, tx = (d - c) / h;
        double ly = (c - a) / h, ry = (d - b) / h;
        double g[4][2] = {{bx, ly}, {bx, ry}, {tx, ly}, {tx, ry}};
        for (int corner = 0; corner < 4; ++corner) fn(corner, g[corner]);
        return;
    }
    const std::size_t mu2 = mu * mu;
    double dx[4], dy[4], dz[4];
    for (int t = 0; t < 4; ++t) {
        int b1 = t & 1, b2 = (t >> 1) & 1;
        dx[t] = (v[base + 1 + mu * b1 + mu2 * b2] - v[base + mu * b1 + mu2 * b2]) / h;
        dy[t] = (v[base + mu + 1 * b1 + mu2 * b2] - v[base + 1 * b1 + mu2 * b2]) / h;
        dz[t] = (v[base + mu2 + 1 * b1 + mu * b2] - v[base + 1 * b1 + mu * b2]) / h;
    }
    for (int corner = 0; corner < 8; ++corner) {
        int bx = corner & 1, by = (corner >> 1) & 1, bz = (corner >> 2) & 1;
        double g[3] = {dx[by + 2 * bz], dy[bx + 2 * bz], dz[bx + 2 * by]};
        fn(corner, g);
    }
}

template <typename F>
void for_cells_of(int n, int m, F&& fn) {
    const std::size_t mu = static_cast<std::size_t>(m);
    if (n == 2) {
        for (int j = 0; j + 1 < m; ++j)
            for (int i = 0; i + 1 < m; ++i) fn(static_cast<std::size_t>(i) + mu * j);
    } else {
        for (int k = 0; k + 1 < m; ++k)
            for (int j = 0; j + 1 < m; ++j)
                for (int i = 0; i + 1 < m; ++i)
                    fn(static_cast<std::size_t>(i) + mu * (static_cast<std::size_t>(j) + mu * k));
    }
}

}  // namespace

double FluxField::q_norm_pow(const Exponent& e) const {
    const int corners = 1 << dim;
    const double weight = std::pow(spacing, dim) / corners;
    double s = 0.0;
    std::size_t samples = components.size() / static_cast<std::size_t>(dim);
    for (std::size_t c = 0; c < samples; ++c) {
        double n2 = 0.0;
        for (int d = 0; d < dim; ++d) {
            double x = components[c * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)];
            n2 += x * x;
        }
        if (n2 != 0.0) s += weight * std::pow(n2, 0.5 * e.q());
    }
    return s;
}

double FluxField::q_norm(const Exponent& e) const { return std::pow(q_norm_pow(e), 1.0 / e.q()); }

FluxField flux_from_extremal(const GridField& u, double c, const Exponent& e) {
    if (c == 0.0)
        throw ValidationError(ErrorCode::InvalidField, "flux needs a nonzero multiplier");
    const int n = u.dim();
    const int m = u.resolution();
    const int corners = 1 << n;
    FluxField f;
    f.dim = n;
    f.half_width = u.half_width();
    f.resolution = m;
    f.spacing = u.spacing();
    std::size_t cells = 1;
    for (int d = 0; d < n; ++d) cells *= static_cast<std::size_t>(m - 1);
    f.components.assign(cells * static_cast<std::size_t>(corners) * static_cast<std::size_t>(n),
                        0.0);
    std::size_t ci = 0;
    for_cells_of(n, m, [&](std::size_t base) {
        for_cell_corner_gradients(u.values(), n, m, u.spacing(), base,
                                  [&](int corner, const double* g) {
                                      double g2 = 0.0;
                                      for (int d = 0; d < n; ++d) g2 += g[d] * g[d];
                                      double coef =
                                          g2 == 0.0 ? 0.0
                                                    : -std::pow(g2, 0.5 * (e.p() - 2.0)) / c;
                                      std::size_t off =
                                          (ci * corners + static_cast<std::size_t>(corner)) *
                                          static_cast<std::size_t>(n);
                                      for (int d = 0; d < n; ++d)
                                          f.components[off + static_cast<std::size_t>(d)] =
                                              coef * g[d];
                                  });
        ++ci;
    });
    return f;
}

double divergence_residual(const PiecewiseConstant& flux, const SignedMeasure& rho,
                           std::span<const PiecewiseLinear> tests) {
    if (rho.dim() != 1)
        throw ValidationError(ErrorCode::DimensionNotOne, "1D flux residual needs a 1D measure");
    double worst = 0.0;
    for (const PiecewiseLinear& phi : tests) {
        std::vector<double> bp = merged_breakpoints(flux.breakpoints(), phi.breakpoints());
        double pairing = 0.0;
        for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
            double dx = bp[i + 1] - bp[i];
            double sphi = (phi.value(bp[i + 1]) - phi.value(bp[i])) / dx;
            if (sphi == 0.0) continue;
            pairing += flux.value(0.5 * (bp[i] + bp[i + 1])) * sphi * dx;
        }
        double source = integrate(phi, rho);
        worst = std::max(worst, std::abs(pairing + source));
    }
    return worst;
}

double divergence_residual(const FluxField& flux, const SignedMeasure& rho) {
    const int n = flux.dim;
    const int m = flux.resolution;
    const double h = flux.spacing;
    const int corners = 1 << n;
    const double weight = std::pow(h, n) / corners;
    GridField grid(n, flux.half_width, m, GridField::FarField::Clamp);
    Splat ms(rho, grid);

    // Assemble integral Dphi_k . F for every nodal hat phi_k, mirroring
    // the corner-gradient scatter of the energy assembly.
    std::vector<double> assembled(grid.node_count(), 0.0);
    const std::size_t mu = static_cast<std::size_t>(m);
    const std::size_t mu2 = mu * mu;
    const std::size_t stride[3] = {1, mu, mu2};
    std::size_t ci = 0;
    for_cells_of(n, m, [&](std::size_t base) {
        for (int corner = 0; corner < corners; ++corner) {
            int bits[3] = {corner & 1, (corner >> 1) & 1, (corner >> 2) & 1};
            std::size_t off = (ci * static_cast<std::size_t>(corners) +
                               static_cast<std::size_t>(corner)) *
                              static_cast<std::size_t>(n);
            for (int d = 0; d < n; ++d) {
                double fd = flux.components[off + static_cast<std::size_t>(d)];
                if (fd == 0.0) continue;
                // lower node of this corner's axis-d edge difference
                std::size_t lo = base;
                for (int d2 = 0; d2 < n; ++d2)
                    if (d2 != d && bits[d2]) lo += stride[d2];
                assembled[lo + stride[d]] += weight * fd / h;
                assembled[lo] -= weight * fd / h;
            }
        }
        ++ci;
    });
    for (const auto& [k, w] : ms.weights()) assembled[k] += w;
    double worst = 0.0;
    for (double a : assembled) worst = std::max(worst, std::abs(a));
    return worst;
}

DualityCertificate duality_gap(const SignedMeasure& rho, const Exponent& e) {
    if (rho.dim() != 1)
        throw ValidationError(ErrorCode::DimensionNotOne, "the exact certificate is 1D");
    // In 1D the admissible flux is unique: the distribution function.
    PiecewiseConstant flux = distribution_function(rho);
    PiecewiseLinear v = extremal_1d(rho, e);
    double qnp = flux.q_norm_pow(e.q());

    DualityCertificate cert;
    cert.flux_qnorm = std::pow(qnp, 1.0 / e.q());
    cert.primal_value =
        std::abs(integrate(v, rho)) / std::pow(v.grad_pnorm_pow(e.p()), 1.0 / e.p());
    cert.gap = cert.flux_qnorm - cert.primal_value;
    cert.moment_factor = std::pow(rho.moment().norm(), e.alpha());
    cert.cstar = cstar_from_flux_qnorm_pow(qnp, rho, e);
    return cert;
}

DualityCertificate duality_gap(const SignedMeasure& rho, const Exponent& e,
                               const ExtremalResult& extremal) {
    FluxField flux = flux_from_extremal(extremal.field, extremal.multiplier, e);
    DualityCertificate cert;
    cert.flux_qnorm = flux.q_norm(e);
    cert.primal_value =
        std::abs(integrate(extremal.field, rho)) / std::pow(extremal.energy, 1.0 / e.p());
    cert.gap = cert.flux_qnorm - cert.primal_value;
    cert.moment_factor = std::pow(rho.moment().norm(), e.alpha());
    cert.cstar = cert.flux_qnorm / cert.moment_factor;
    return cert;
}

namespace {

void require_pushforward(const SignedMeasure& rho, const Similarity& t, double sign) {
    SignedMeasure pushed = pushforward(t, rho);
    if (pushed.size() != rho.size())
        throw ValidationError(ErrorCode::PushforwardMismatch,
                              "pushforward changes the atom count");
    double loc_tol = 1e-10 * std::max(1.0, rho.support_radius());
    double w_tol = 1e-10 * rho.total_abs_weight();
    // Atoms are sorted by location at construction, so compare in order.
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const Atom& a = pushed.atoms()[i];
        const Atom& b = rho.atoms()[i];
        if (distance(a.location, b.location) > loc_tol ||
            std::abs(a.weight - sign * b.weight) > w_tol)
            throw ValidationError(ErrorCode::PushforwardMismatch,
                                  sign > 0 ? "T does not preserve the measure"
                                           : "T does not negate the measure");
    }
}

}  // namespace

double check_symmetry(const ScalarField& u, const SignedMeasure& rho, const Similarity& t,
                      std::span<const Vec> samples) {
    require_pushforward(rho, t, 1.0);
    double worst = 0.0;
    for (const Vec& x : samples)
        worst = std::max(worst, std::abs(u.value(x) - u.value(t.apply(x))));
    return worst;
}

double check_antisymmetry(const ScalarField& u, const SignedMeasure& rho, const Similarity& t,
                          std::span<const Vec> samples) {
    require_pushforward(rho, t, -1.0);
    if (samples.empty()) return 0.0;
    double mean = 0.0;
    std::vector<double> vals;
    vals.reserve(samples.size());
    for (const Vec& x : samples) {
        double s = u.value(x) + u.value(t.apply(x));
        vals.push_back(s);
        mean += s;
    }
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double s : vals) var += (s - mean) * (s - mean);
    return std::sqrt(var / static_cast<double>(vals.size()));
}

std::vector<Vec> symmetry_samples(const GridField& u, const Similarity& t) {
    std::vector<Vec> pts;
    const int m = u.resolution();
    for (int k = 0; k < (u.dim() == 3 ? m : 1); ++k)
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) {
                Vec x = u.node(i, j, k);
                if (u.contains(t.apply(x))) pts.push_back(x);
            }
    return pts;
}

std::vector<Vec> symmetry_samples_1d(const PiecewiseLinear& u, const Similarity& t, int count) {
    Box r = u.region();
    double lo = r.lo[0], hi = r.hi[0];
    double tlo = t.apply(Vec{lo})[0], thi = t.apply(Vec{hi})[0];
    lo = std::min({lo, tlo, thi});
    hi = std::max({hi, tlo, thi});
    std::vector<Vec> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        pts.push_back(Vec{count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (count - 1)});
    return pts;
}

Similarity midpoint_reflection(const Vec& x0, const Vec& y0) {
    Vec d = x0 - y0;
    double nrm = d.norm();
    if (nrm <= 1e-14 * std::max(1.0, x0.norm() + y0.norm()))
        throw ValidationError(ErrorCode::CoincidentPoints, "reflection needs distinct points");
    int n = x0.dim();
    Vec dh = d * (1.0 / nrm);
    Mat o = Mat::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) o(i, j) -= 2.0 * dh[i] * dh[j];
    Vec mid = (x0 + y0) * 0.5;
    Vec z = mid - o * mid;
    return Similarity(1.0, o, z);
}

std::vector<Similarity> axial_rotations(const Vec& x0, const Vec& y0, int count) {
    Vec d = y0 - x0;
    double nrm = d.norm();
    if (nrm <= 1e-14 * std::max(1.0, x0.norm() + y0.norm()))
        throw ValidationError(ErrorCode::CoincidentPoints, "axis needs distinct points");
    int n = x0.dim();
    std::vector<Similarity> out;
    if (count < 1) return out;

    auto about_x0 = [&](const Mat& o) {
        Vec z = x0 - o * x0;
        return Similarity(1.0, o, z);
    };

    if (n == 1) {
        out.push_back(Similarity::identity(1));
        return out;
    }
    if (n == 2) {
        // The only nontrivial orthogonal map fixing d is the reflection
        // across the line through x0 with direction d.
        Vec dh = d * (1.0 / nrm);
        Mat o(2);
        o(0, 0) = 2.0 * dh[0] * dh[0] - 1.0;
        o(0, 1) = 2.0 * dh[0] * dh[1];
        o(1, 0) = 2.0 * dh[0] * dh[1];
        o(1, 1) = 2.0 * dh[1] * dh[1] - 1.0;
        out.push_back(about_x0(o));
        if (count > 1) out.push_back(Similarity::identity(2));
        return out;
    }
    for (int k = 1; k <= count; ++k) {
        double angle = 2.0 * M_PI * k / (count + 1);
        out.push_back(about_x0(rotation_3d(d, angle, false)));
    }
    return out;
}

}  // namespace morrey
