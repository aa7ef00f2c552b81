#include "morrey/seminorm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace morrey {

double ratio(const ScalarField& u, const SignedMeasure& rho, const Similarity& s,
             const Exponent& e) {
    double num = 0.0;
    for (const Atom& a : rho.atoms()) num += a.weight * u.value(s.apply(a.location));
    double m = rho.moment().norm();
    return std::pow(s.scale(), -e.alpha()) * std::abs(num) / std::pow(m, e.alpha());
}

double comparison_constant(const SignedMeasure& rho, const Exponent& e) {
    double num = 0.0;
    for (const Atom& a : rho.atoms())
        num += std::abs(a.weight) * std::pow(a.location.norm(), e.alpha());
    return num / std::pow(rho.moment().norm(), e.alpha());
}

double holder_seminorm(const ScalarField& u, const Exponent& e, std::span<const Vec> samples) {
    double best = 0.0;
    std::vector<double> vals(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) vals[i] = u.value(samples[i]);
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            double d = distance(samples[i], samples[j]);
            if (d == 0.0) continue;
            best = std::max(best, std::abs(vals[i] - vals[j]) / std::pow(d, e.alpha()));
        }
    return best;
}

std::vector<Vec> holder_default_samples(const ScalarField& u, int per_axis) {
    Box r = u.region();
    int n = u.dim();
    std::vector<Vec> pts;
    int total = 1;
    for (int d = 0; d < n; ++d) total *= per_axis;
    pts.reserve(static_cast<std::size_t>(total));
    for (int c = 0; c < total; ++c) {
        Vec x(n);
        int rem = c;
        for (int d = 0; d < n; ++d) {
            int i = rem % per_axis;
            rem /= per_axis;
            x[d] = per_axis == 1 ? 0.5 * (r.lo[d] + r.hi[d])
                                 : r.lo[d] + (r.hi[d] - r.lo[d]) * i / (per_axis - 1);
        }
        pts.push_back(x);
    }
    return pts;
}

SearchConfig SearchConfig::defaults(const ScalarField& u, const SignedMeasure& rho) {
    SearchConfig cfg;
    Box region = u.region();
    double diam_rho = rho.support_diameter();
    double d = region.diameter();
    if (d == 0.0) d = diam_rho;
    cfg.lambda_min = 0.01 * d / diam_rho;
    cfg.lambda_max = 100.0 * d / diam_rho;
    cfg.z_box = region;
    if (region.diameter() == 0.0) {
        for (int i = 0; i < region.dim(); ++i) {
            cfg.z_box.lo[i] -= 0.5 * d;
            cfg.z_box.hi[i] += 0.5 * d;
        }
    }
    cfg.orientation_count = u.dim() == 3 ? 60 : 16;
    return cfg;
}

namespace {

// Orientation chart: continuous parameters plus a discrete reflection bit.
// n = 1: the bit is the sign; n = 2: angle a; n = 3: rotation vector (a,b,c).
struct OrientChart {
    double a = 0.0, b = 0.0, c = 0.0;
    bool reflect = false;
};

Mat chart_matrix(int dim, const OrientChart& oc) {
    switch (dim) {
        case 1: {
            Mat o(1);
            o(0, 0) = oc.reflect ? -1.0 : 1.0;
            return o;
        }
        case 2:
            return rotation_2d(oc.a, oc.reflect);
        default: {
            Vec r{oc.a, oc.b, oc.c};
            double angle = r.norm();
            Vec axis = angle == 0.0 ? Vec{0.0, 0.0, 1.0} : r * (1.0 / angle);
            return rotation_3d(axis, angle, oc.reflect);
        }
    }
}

int orient_param_count(int dim) { return dim == 1 ? 0 : (dim == 2 ? 1 : 3); }

std::vector<OrientChart> orientation_samples(int dim, int count, bool reflections) {
    std::vector<OrientChart> out;
    if (dim == 1) {
        out.push_back({0, 0, 0, false});
        out.push_back({0, 0, 0, true});
        return out;
    }
    if (dim == 2) {
        for (int k = 0; k < count; ++k) {
            double theta = 2.0 * M_PI * k / count;
            out.push_back({theta, 0, 0, false});
            if (reflections) out.push_back({theta, 0, 0, true});
        }
        return out;
    }
    // n = 3: axes on a Fibonacci sphere with golden-ratio angle spread
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
        double z = 1.0 - 2.0 * (k + 0.5) / count;
        double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = golden * k;
        Vec axis{rr * std::cos(phi), rr * std::sin(phi), z};
        double angle = 2.0 * M_PI * std::fmod(0.61803398874989484820 * (k + 1), 1.0);
        Vec r = axis * angle;
        out.push_back({r[0], r[1], r[2], false});
        if (reflections) out.push_back({r[0], r[1], r[2], true});
    }
    return out;
}

struct Candidate {
    double ratio;
    Similarity similarity;
};

// Deterministic tie-break: larger ratio, then smaller |log lambda|, then
// smaller |z|.
bool better(const Candidate& a, const Candidate& b) {
    if (a.ratio != b.ratio) return a.ratio > b.ratio;
    double la = std::abs(std::log(a.similarity.scale()));
    double lb = std::abs(std::log(b.similarity.scale()));
    if (la != lb) return la < lb;
    return a.similarity.shift().norm() < b.similarity.shift().norm();
}

// Minimal Nelder-Mead on R^d; stops when the simplex value spread drops
// below ftol or after max_iters reflections.
std::pair<std::vector<double>, double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& x0,
    const std::vector<double>& step, int max_iters, double ftol) {
    const std::size_t d = x0.size();
    std::vector<std::vector<double>> xs(d + 1, x0);
    for (std::size_t i = 0; i < d; ++i) xs[i + 1][i] += step[i];
    std::vector<double> fs(d + 1);
    for (std::size_t i = 0; i <= d; ++i) fs[i] = f(xs[i]);

    auto order = [&] {
        std::vector<std::size_t> idx(d + 1);
        for (std::size_t i = 0; i <= d; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        std::vector<std::vector<double>> nxs(d + 1);
        std::vector<double> nfs(d + 1);
        for (std::size_t i = 0; i <= d; ++i) {
            nxs[i] = xs[idx[i]];
            nfs[i] = fs[idx[i]];
        }
        xs = std::move(nxs);
        fs = std::move(nfs);
    };

    for (int it = 0; it < max_iters; ++it) {
        order();
        if (fs[d] - fs[0] < ftol) break;
        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) centroid[j] += xs[i][j] / d;
        auto at = [&](double t) {
            std::vector<double> x(d);
            for (std::size_t j = 0; j < d; ++j) x[j] = centroid[j] + t * (xs[d][j] - centroid[j]);
            return x;
        };
        std::vector<double> xr = at(-1.0);
        double fr = f(xr);
        if (fr < fs[0]) {
            std::vector<double> xe = at(-2.0);
            double fe = f(xe);
            if (fe < fr) {
                xs[d] = xe;
                fs[d] = fe;
            } else {
                xs[d] = xr;
                fs[d] = fr;
            }
        } else if (fr < fs[d - 1]) {
            xs[d] = xr;
            fs[d] = fr;
        } else {
            std::vector<double> xc = at(fr < fs[d] ? -0.5 : 0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fs[d])) {
                xs[d] = xc;
                fs[d] = fc;
            } else {
                for (std::size_t i = 1; i <= d; ++i) {
                    for (std::size_t j = 0; j < d; ++j)
                        xs[i][j] = xs[0][j] + 0.5 * (xs[i][j] - xs[0][j]);
                    fs[i] = f(xs[i]);
                }
            }
        }
    }
    order();
    return {xs[0], fs[0]};
}

}  // namespace

SeminormResult seminorm(const ScalarField& u, const SignedMeasure& rho, const Exponent& e,
                        const SearchConfig& cfg) {
    if (cfg.lambda_count < 1 || cfg.z_count < 1 || !(cfg.lambda_min > 0.0) ||
        cfg.lambda_max < cfg.lambda_min || cfg.z_box.dim() != u.dim())
        throw ValidationError(ErrorCode::EmptySearchConfig, "search configuration is empty");

    const int n = u.dim();
    const int ocount = cfg.orientation_count > 0 ? cfg.orientation_count : (n == 3 ? 60 : 16);
    std::vector<OrientChart> orients = orientation_samples(n, ocount, cfg.reflections);

    SeminormResult result{0.0, Similarity::identity(n), 0.0, {}};
    Candidate best{-1.0, Similarity::identity(n)};

    struct Start {
        Candidate cand;
        OrientChart chart;
    };
    std::vector<Start> top;  // polish pool, kept sorted best-first

    auto consider = [&](const Similarity& s, const OrientChart* chart) {
        double r;
        try {
            r = ratio(u, rho, s, e);
        } catch (const ValidationError&) {
            return;  // strict field evaluated off-domain: not a candidate
        }
        if (cfg.record_trace) result.trace.push_back({s, r});
        Candidate c{r, s};
        if (best.ratio < 0.0 || better(c, best)) best = c;
        if (chart != nullptr && cfg.polish_starts > 0) {
            top.push_back({c, *chart});
            std::sort(top.begin(), top.end(),
                      [](const Start& a, const Start& b) { return better(a.cand, b.cand); });
            if (top.size() > static_cast<std::size_t>(cfg.polish_starts)) top.pop_back();
        }
    };

    // The identity is always a candidate; it anchors exact extremal cases.
    consider(Similarity::identity(n), nullptr);

    std::vector<double> lambdas(static_cast<std::size_t>(cfg.lambda_count));
    for (int i = 0; i < cfg.lambda_count; ++i) {
        double t = cfg.lambda_count == 1 ? 0.0 : static_cast<double>(i) / (cfg.lambda_count - 1);
        lambdas[static_cast<std::size_t>(i)] = std::exp(
            std::log(cfg.lambda_min) + t * (std::log(cfg.lambda_max) - std::log(cfg.lambda_min)));
    }

    long z_total = 1;
    for (int d = 0; d < n; ++d) z_total *= cfg.z_count;
    auto z_at = [&](long zi) {
        Vec z(n);
        long rem = zi;
        for (int d = 0; d < n; ++d) {
            int i = static_cast<int>(rem % cfg.z_count);
            rem /= cfg.z_count;
            z[d] = cfg.z_count == 1
                       ? 0.5 * (cfg.z_box.lo[d] + cfg.z_box.hi[d])
                       : cfg.z_box.lo[d] + (cfg.z_box.hi[d] - cfg.z_box.lo[d]) * i / (cfg.z_count - 1);
        }
        return z;
    };

    for (double lambda : lambdas)
        for (const OrientChart& oc : orients) {
            Mat o = chart_matrix(n, oc);
            for (long zi = 0; zi < z_total; ++zi) consider(Similarity(lambda, o, z_at(zi)), &oc);
        }

    // Derivative-free polish of the best starts in (log lambda, chart, z).
    if (cfg.polish_starts > 0 && cfg.polish_iterations > 0) {
        const int opc = orient_param_count(n);
        const std::size_t dims = static_cast<std::size_t>(1 + opc + n);
        double zscale = std::max(cfg.z_box.diameter(), 1e-3);
        for (const Start& st : top) {
            const OrientChart oc = st.chart;
            auto unpack = [&](const std::vector<double>& x) {
                OrientChart o2 = oc;
                if (opc >= 1) o2.a = x[1];
                if (opc == 3) {
                    o2.b = x[2];
                    o2.c = x[3];
                }
                Vec z(n);
                for (int d = 0; d < n; ++d) z[d] = x[static_cast<std::size_t>(1 + opc + d)];
                return Similarity(std::exp(x[0]), chart_matrix(n, o2), z);
            };
            std::vector<double> x0(dims, 0.0);
            x0[0] = std::log(st.cand.similarity.scale());
            if (opc >= 1) x0[1] = oc.a;
            if (opc == 3) {
                x0[2] = oc.b;
                x0[3] = oc.c;
            }
            for (int d = 0; d < n; ++d)
                x0[static_cast<std::size_t>(1 + opc + d)] = st.cand.similarity.shift()[d];
            std::vector<double> step(dims, 0.1);
            for (int d = 0; d < n; ++d) step[static_cast<std::size_t>(1 + opc + d)] = 0.05 * zscale;

            auto objective = [&](const std::vector<double>& x) {
                try {
                    Similarity s = unpack(x);
                    double r = ratio(u, rho, s, e);
                    if (cfg.record_trace) result.trace.push_back({s, r});
                    Candidate c{r, s};
                    if (better(c, best)) best = c;
                    return -r;
                } catch (const ValidationError&) {
                    return std::numeric_limits<double>::infinity();
                }
            };
            nelder_mead(objective, x0, step, cfg.polish_iterations, cfg.polish_tol);
        }
    }

    result.value = std::max(best.ratio, 0.0);
    result.argmax = best.similarity;
    result.ratio_at_argmax = result.value;
    return result;
}

}  // namespace morrey
