#include "morrey/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <random>

namespace morrey {

Splat::Splat(const SignedMeasure& mu, const GridField& grid) {
    const int n = grid.dim();
    const int m = grid.resolution();
    const double L = grid.half_width();
    const double h = grid.spacing();
    std::map<std::size_t, double> acc;
    for (const Atom& a : mu.atoms()) {
        for (int d = 0; d < n; ++d)
            if (!(std::abs(a.location[d]) < L))
                throw ValidationError(ErrorCode::AtomOutsideBox,
                                      "atom must lie strictly inside the grid box");
        int idx[3] = {0, 0, 0};
        double frac[3] = {0.0, 0.0, 0.0};
        for (int d = 0; d < n; ++d) {
            double t = (a.location[d] + L) / h;
            int i = std::clamp(static_cast<int>(std::floor(t)), 0, m - 2);
            idx[d] = i;
            frac[d] = t - i;
        }
        int corners = 1 << n;
        std::vector<std::pair<std::size_t, double>> local;
        local.reserve(static_cast<std::size_t>(corners));
        double sum = 0.0;
        for (int c = 0; c < corners; ++c) {
            double w = a.weight;
            int off[3] = {0, 0, 0};
            for (int d = 0; d < n; ++d) {
                int bit = (c >> d) & 1;
                off[d] = bit;
                w *= bit ? frac[d] : 1.0 - frac[d];
            }
            local.emplace_back(grid.index(idx[0] + off[0], idx[1] + off[1], idx[2] + off[2]), w);
            sum += w;
        }
        // Close the largest weight so the per-atom sum is exactly w_i.
        auto big = std::max_element(local.begin(), local.end(), [](auto& x, auto& y) {
            return std::abs(x.second) < std::abs(y.second);
        });
        big->second += a.weight - sum;
        for (auto& [k, w] : local)
            if (w != 0.0) acc[k] += w;
    }
    weights_.assign(acc.begin(), acc.end());
}

double Splat::pair(const std::vector<double>& values) const {
    double s = 0.0;
    for (const auto& [k, w] : weights_) s += w * values[k];
    return s;
}

std::vector<std::size_t> Splat::support_nodes() const {
    std::vector<std::size_t> out;
    out.reserve(weights_.size());
    for (const auto& [k, w] : weights_) out.push_back(k);
    return out;
}

namespace {

// pow(g2, ex) with fast paths for the half-integer exponents that the
// common p values produce.
inline double pow_half(double g2, double ex) {
    if (ex == 1.0) return g2;
    if (ex == 2.0) return g2 * g2;
    if (ex == 0.5) return std::sqrt(g2);
    if (ex == 1.5) return g2 * std::sqrt(g2);
    if (ex == 3.0) return g2 * g2 * g2;
    return std::pow(g2, ex);
}

// Discretization: per cell, one one-sided gradient per corner (2^n of
// them), each built from the edge differences incident to that corner.
// E = sum_cells (h^n / 2^n) sum_corners |g_corner|^p. Convex in the nodal
// values, exact on affine fields, and equivariant under all reflections
// and axis swaps of the lattice, so discrete minimizers inherit the
// symmetries of the measure. A single forward-difference gradient per
// cell breaks those symmetries at O(h).

// 2D cell: nodes A = c, B = c+1, C = c+m, D = c+m+1, differences
// bx = (B-A)/h, tx = (D-C)/h, ly = (C-A)/h, ry = (D-B)/h; the corner
// gradients are (bx,ly), (bx,ry), (tx,ly), (tx,ry).

double energy_raw(const std::vector<double>& v, int n, int m, double h, double p) {
    const double halfp = 0.5 * p;
    const std::size_t mu = static_cast<std::size_t>(m);
    double total = 0.0;
    if (n == 2) {
        const double w4 = h * h / 4.0;
        for (int j = 0; j + 1 < m; ++j) {
            std::size_t row = mu * static_cast<std::size_t>(j);
            for (int i = 0; i + 1 < m; ++i) {
                std::size_t c = row + static_cast<std::size_t>(i);
                double a = v[c], b = v[c + 1], cc = v[c + mu], d = v[c + mu + 1];
                double bx = (b - a) / h, tx = (d - cc) / h;
                double ly = (cc - a) / h, ry = (d - b) / h;
                double s = pow_half(bx * bx + ly * ly, halfp) + pow_half(bx * bx + ry * ry, halfp) +
                           pow_half(tx * tx + ly * ly, halfp) + pow_half(tx * tx + ry * ry, halfp);
                total += w4 * s;
            }
        }
        return total;
    }
    const std::size_t mu2 = mu * mu;
    const double w8 = h * h * h / 8.0;
    for (int k = 0; k + 1 < m; ++k)
        for (int j = 0; j + 1 < m; ++j)
            for (int i = 0; i + 1 < m; ++i) {
                std::size_t c = static_cast<std::size_t>(i) +
                                mu * (static_cast<std::size_t>(j) + mu * static_cast<std::size_t>(k));
                // edge differences along each axis, indexed by the two
                // complementary bits
                double dx[4], dy[4], dz[4];
                for (int t = 0; t < 4; ++t) {
                    int b1 = t & 1, b2 = (t >> 1) & 1;
                    dx[t] = (v[c + 1 + mu * b1 + mu2 * b2] - v[c + mu * b1 + mu2 * b2]) / h;
                    dy[t] = (v[c + mu + 1 * b1 + mu2 * b2] - v[c + 1 * b1 + mu2 * b2]) / h;
                    dz[t] = (v[c + mu2 + 1 * b1 + mu * b2] - v[c + 1 * b1 + mu * b2]) / h;
                }
                for (int corner = 0; corner < 8; ++corner) {
                    int bx = corner & 1, by = (corner >> 1) & 1, bz = (corner >> 2) & 1;
                    double gx = dx[by + 2 * bz];
                    double gy = dy[bx + 2 * bz];
                    double gz = dz[bx + 2 * by];
                    total += w8 * pow_half(gx * gx + gy * gy + gz * gz, halfp);
                }
            }
    return total;
}

double energy_and_gradient_raw(const std::vector<double>& v, int n, int m, double h, double p,
                               std::vector<double>& grad) {
    const double halfp = 0.5 * p;
    const std::size_t mu = static_cast<std::size_t>(m);
    grad.assign(v.size(), 0.0);
    double total = 0.0;
    if (n == 2) {
        const double w4 = h * h / 4.0;
        for (int j = 0; j + 1 < m; ++j) {
            std::size_t row = mu * static_cast<std::size_t>(j);
            for (int i = 0; i + 1 < m; ++i) {
                std::size_t c = row + static_cast<std::size_t>(i);
                std::size_t A = c, B = c + 1, C = c + mu, D = c + mu + 1;
                double bx = (v[B] - v[A]) / h, tx = (v[D] - v[C]) / h;
                double ly = (v[C] - v[A]) / h, ry = (v[D] - v[B]) / h;
                double gA2 = bx * bx + ly * ly, gB2 = bx * bx + ry * ry;
                double gC2 = tx * tx + ly * ly, gD2 = tx * tx + ry * ry;
                total += w4 * (pow_half(gA2, halfp) + pow_half(gB2, halfp) +
                               pow_half(gC2, halfp) + pow_half(gD2, halfp));
                double sA = gA2 > 0.0 ? pow_half(gA2, halfp - 1.0) : 0.0;
                double sB = gB2 > 0.0 ? pow_half(gB2, halfp - 1.0) : 0.0;
                double sC = gC2 > 0.0 ? pow_half(gC2, halfp - 1.0) : 0.0;
                double sD = gD2 > 0.0 ? pow_half(gD2, halfp - 1.0) : 0.0;
                double coef = w4 * p / h;
                double fbx = coef * (sA + sB) * bx;
                double ftx = coef * (sC + sD) * tx;
                double fly = coef * (sA + sC) * ly;
                double fry = coef * (sB + sD) * ry;
                grad[A] -= fbx + fly;
                grad[B] += fbx - fry;
                grad[C] += fly - ftx;
                grad[D] += ftx + fry;
            }
        }
        return total;
    }
    const std::size_t mu2 = mu * mu;
    const double w8 = h * h * h / 8.0;
    for (int k = 0; k + 1 < m; ++k)
        for (int j = 0; j + 1 < m; ++j)
            for (int i = 0; i + 1 < m; ++i) {
                std::size_t c = static_cast<std::size_t>(i) +
                                mu * (static_cast<std::size_t>(j) + mu * static_cast<std::size_t>(k));
                std::size_t lo_x[4], lo_y[4], lo_z[4];
                double dx[4], dy[4], dz[4], fx[4] = {0, 0, 0, 0}, fy[4] = {0, 0, 0, 0},
                                             fz[4] = {0, 0, 0, 0};
                for (int t = 0; t < 4; ++t) {
                    int b1 = t & 1, b2 = (t >> 1) & 1;
                    lo_x[t] = c + mu * b1 + mu2 * b2;
                    lo_y[t] = c + 1 * b1 + mu2 * b2;
                    lo_z[t] = c + 1 * b1 + mu * b2;
                    dx[t] = (v[lo_x[t] + 1] - v[lo_x[t]]) / h;
                    dy[t] = (v[lo_y[t] + mu] - v[lo_y[t]]) / h;
                    dz[t] = (v[lo_z[t] + mu2] - v[lo_z[t]]) / h;
                }
                for (int corner = 0; corner < 8; ++corner) {
                    int bx = corner & 1, by = (corner >> 1) & 1, bz = (corner >> 2) & 1;
                    int ix = by + 2 * bz, iy = bx + 2 * bz, iz = bx + 2 * by;
                    double gx = dx[ix], gy = dy[iy], gz = dz[iz];
                    double g2 = gx * gx + gy * gy + gz * gz;
                    if (g2 == 0.0) continue;
                    total += w8 * pow_half(g2, halfp);
                    double s = pow_half(g2, halfp - 1.0);
                    fx[ix] += s * gx;
                    fy[iy] += s * gy;
                    fz[iz] += s * gz;
                }
                double coef = w8 * p / h;
                for (int t = 0; t < 4; ++t) {
                    grad[lo_x[t] + 1] += coef * fx[t];
                    grad[lo_x[t]] -= coef * fx[t];
                    grad[lo_y[t] + mu] += coef * fy[t];
                    grad[lo_y[t]] -= coef * fy[t];
                    grad[lo_z[t] + mu2] += coef * fz[t];
                    grad[lo_z[t]] -= coef * fz[t];
                }
            }
    return total;
}

// Hessian-vector product; same corner sweep with the second derivative
// p |g|^{p-2} I + p (p-2) |g|^{p-4} g g^T per corner gradient.
void hessvec_raw(const std::vector<double>& v, int n, int m, double h, double p,
                 const std::vector<double>& x, std::vector<double>& out) {
    const double halfp = 0.5 * p;
    const std::size_t mu = static_cast<std::size_t>(m);
    out.assign(v.size(), 0.0);
    if (n == 2) {
        const double w4 = h * h / 4.0;
        for (int j = 0; j + 1 < m; ++j) {
            std::size_t row = mu * static_cast<std::size_t>(j);
            for (int i = 0; i + 1 < m; ++i) {
                std::size_t c = row + static_cast<std::size_t>(i);
                std::size_t A = c, B = c + 1, C = c + mu, D = c + mu + 1;
                double bx = (v[B] - v[A]) / h, tx = (v[D] - v[C]) / h;
                double ly = (v[C] - v[A]) / h, ry = (v[D] - v[B]) / h;
                double xbx = (x[B] - x[A]) / h, xtx = (x[D] - x[C]) / h;
                double xly = (x[C] - x[A]) / h, xry = (x[D] - x[B]) / h;
                double fbx = 0.0, ftx = 0.0, fly = 0.0, fry = 0.0;
                auto corner = [&](double gx, double gy, double vx, double vy, double& outx,
                                  double& outy) {
                    double g2 = gx * gx + gy * gy;
                    if (g2 < 1e-280) return;
                    double a = p * pow_half(g2, halfp - 1.0);
                    double b = p * (p - 2.0) * pow_half(g2, halfp - 2.0) * (gx * vx + gy * vy);
                    outx += a * vx + b * gx;
                    outy += a * vy + b * gy;
                };
                corner(bx, ly, xbx, xly, fbx, fly);
                corner(bx, ry, xbx, xry, fbx, fry);
                corner(tx, ly, xtx, xly, ftx, fly);
                corner(tx, ry, xtx, xry, ftx, fry);
                double coef = w4 / h;
                out[A] -= coef * (fbx + fly);
                out[B] += coef * (fbx - fry);
                out[C] += coef * (fly - ftx);
                out[D] += coef * (ftx + fry);
            }
        }
        return;
    }
    const std::size_t mu2 = mu * mu;
    const double w8 = h * h * h / 8.0;
    for (int k = 0; k + 1 < m; ++k)
        for (int j = 0; j + 1 < m; ++j)
            for (int i = 0; i + 1 < m; ++i) {
                std::size_t c = static_cast<std::size_t>(i) +
                                mu * (static_cast<std::size_t>(j) + mu * static_cast<std::size_t>(k));
                std::size_t lo_x[4], lo_y[4], lo_z[4];
                double dx[4], dy[4], dz[4], xdx[4], xdy[4], xdz[4];
                double fx[4] = {0, 0, 0, 0}, fy[4] = {0, 0, 0, 0}, fz[4] = {0, 0, 0, 0};
                for (int t = 0; t < 4; ++t) {
                    int b1 = t & 1, b2 = (t >> 1) & 1;
                    lo_x[t] = c + mu * b1 + mu2 * b2;
                    lo_y[t] = c + 1 * b1 + mu2 * b2;
                    lo_z[t] = c + 1 * b1 + mu * b2;
                    dx[t] = (v[lo_x[t] + 1] - v[lo_x[t]]) / h;
                    dy[t] = (v[lo_y[t] + mu] - v[lo_y[t]]) / h;
                    dz[t] = (v[lo_z[t] + mu2] - v[lo_z[t]]) / h;
                    xdx[t] = (x[lo_x[t] + 1] - x[lo_x[t]]) / h;
                    xdy[t] = (x[lo_y[t] + mu] - x[lo_y[t]]) / h;
                    xdz[t] = (x[lo_z[t] + mu2] - x[lo_z[t]]) / h;
                }
                for (int corner = 0; corner < 8; ++corner) {
                    int bx = corner & 1, by = (corner >> 1) & 1, bz = (corner >> 2) & 1;
                    int ix = by + 2 * bz, iy = bx + 2 * bz, iz = bx + 2 * by;
                    double gx = dx[ix], gy = dy[iy], gz = dz[iz];
                    double g2 = gx * gx + gy * gy + gz * gz;
                    if (g2 < 1e-280) continue;
                    double a = p * pow_half(g2, halfp - 1.0);
                    double gdot = gx * xdx[ix] + gy * xdy[iy] + gz * xdz[iz];
                    double b = p * (p - 2.0) * pow_half(g2, halfp - 2.0) * gdot;
                    fx[ix] += a * xdx[ix] + b * gx;
                    fy[iy] += a * xdy[iy] + b * gy;
                    fz[iz] += a * xdz[iz] + b * gz;
                }
                double coef = w8 / h;
                for (int t = 0; t < 4; ++t) {
                    out[lo_x[t] + 1] += coef * fx[t];
                    out[lo_x[t]] -= coef * fx[t];
                    out[lo_y[t] + mu] += coef * fy[t];
                    out[lo_y[t]] -= coef * fy[t];
                    out[lo_z[t] + mu2] += coef * fz[t];
                    out[lo_z[t]] -= coef * fz[t];
                }
            }
}

// Banded lower-triangular storage of the 2D energy Hessian; the corner
// stencil couples offsets {1, m-1, m, m+1}, so the band width is m + 1.
struct BandedHessian {
    int n = 0;
    int bw = 0;
    std::vector<double> band;

    void assemble(const std::vector<double>& v, int m, double h, double p, double shift) {
        n = m * m;
        bw = m + 1;
        band.assign(static_cast<std::size_t>(n) * (bw + 1), 0.0);
        const double halfp = 0.5 * p;
        const double w4 = h * h / 4.0;
        auto add = [&](int row, int col, double val) {
            if (row < col) std::swap(row, col);
            band[static_cast<std::size_t>(col) * (bw + 1) + (row - col)] += val;
        };
        for (int j = 0; j + 1 < m; ++j)
            for (int i = 0; i + 1 < m; ++i) {
                int c = i + m * j;
                int A = c, B = c + 1, C = c + m, D = c + m + 1;
                double bx = (v[B] - v[A]) / h, tx = (v[D] - v[C]) / h;
                double ly = (v[C] - v[A]) / h, ry = (v[D] - v[B]) / h;
                // per corner: nodes and rows of dg/du for (gx, gy)
                struct Term {
                    double gx, gy;
                    int id[3];
                    double jx[3], jy[3];
                };
                Term terms[4] = {
                    {bx, ly, {A, B, C}, {-1, 1, 0}, {-1, 0, 1}},
                    {bx, ry, {A, B, D}, {-1, 1, 0}, {0, -1, 1}},
                    {tx, ly, {A, C, D}, {0, -1, 1}, {-1, 1, 0}},
                    {tx, ry, {B, C, D}, {0, -1, 1}, {-1, 0, 1}},
                };
                for (const Term& t : terms) {
                    double g2 = t.gx * t.gx + t.gy * t.gy;
                    if (g2 < 1e-280) continue;
                    double a = w4 * p * pow_half(g2, halfp - 1.0);
                    double b = w4 * p * (p - 2.0) * pow_half(g2, halfp - 2.0);
                    double hxx = (a + b * t.gx * t.gx) / (h * h);
                    double hyy = (a + b * t.gy * t.gy) / (h * h);
                    double hxy = (b * t.gx * t.gy) / (h * h);
                    for (int r = 0; r < 3; ++r)
                        for (int s = 0; s <= r; ++s)
                            add(t.id[r], t.id[s],
                                hxx * t.jx[r] * t.jx[s] + hyy * t.jy[r] * t.jy[s] +
                                    hxy * (t.jx[r] * t.jy[s] + t.jy[r] * t.jx[s]));
                }
            }
        for (int c = 0; c < n; ++c) band[static_cast<std::size_t>(c) * (bw + 1)] += shift;
    }

    // In-place banded Cholesky; false on a nonpositive pivot.
    bool factor() {
        const std::size_t w = static_cast<std::size_t>(bw + 1);
        for (int j = 0; j < n; ++j) {
            for (int k = std::max(0, j - bw); k < j; ++k) {
                double ljk = band[static_cast<std::size_t>(k) * w + (j - k)];
                if (ljk == 0.0) continue;
                int top = std::min(n - 1, k + bw);
                for (int i = j; i <= top; ++i)
                    band[static_cast<std::size_t>(j) * w + (i - j)] -=
                        ljk * band[static_cast<std::size_t>(k) * w + (i - k)];
            }
            double pivot = band[static_cast<std::size_t>(j) * w];
            if (!(pivot > 0.0)) return false;
            double d = std::sqrt(pivot);
            band[static_cast<std::size_t>(j) * w] = d;
            int top = std::min(n - 1, j + bw);
            for (int i = j + 1; i <= top; ++i) band[static_cast<std::size_t>(j) * w + (i - j)] /= d;
        }
        return true;
    }

    std::vector<double> solve(const std::vector<double>& rhs) const {
        const std::size_t w = static_cast<std::size_t>(bw + 1);
        std::vector<double> y = rhs;
        for (int j = 0; j < n; ++j) {
            double s = y[static_cast<std::size_t>(j)] / band[static_cast<std::size_t>(j) * w];
            y[static_cast<std::size_t>(j)] = s;
            int top = std::min(n - 1, j + bw);
            for (int i = j + 1; i <= top; ++i)
                y[static_cast<std::size_t>(i)] -= s * band[static_cast<std::size_t>(j) * w + (i - j)];
        }
        for (int j = n - 1; j >= 0; --j) {
            double s = y[static_cast<std::size_t>(j)];
            int top = std::min(n - 1, j + bw);
            for (int i = j + 1; i <= top; ++i)
                s -= band[static_cast<std::size_t>(j) * w + (i - j)] * y[static_cast<std::size_t>(i)];
            y[static_cast<std::size_t>(j)] = s / band[static_cast<std::size_t>(j) * w];
        }
        return y;
    }
};

// Truncated CG for H d = rhs (used for n = 3, where the band is too wide).
std::vector<double> cg_direction(const std::vector<double>& v, int n, int m, double h, double p,
                                 const std::vector<double>& rhs, int max_cg, double rel_tol) {
    std::vector<double> d(rhs.size(), 0.0), r = rhs, q(rhs.size());
    std::vector<double> pk = r;
    double rr = 0.0;
    for (double x : r) rr += x * x;
    double rr0 = rr;
    if (rr0 == 0.0) return d;
    for (int it = 0; it < max_cg; ++it) {
        hessvec_raw(v, n, m, h, p, pk, q);
        double pq = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) pq += pk[i] * q[i];
        if (pq <= 1e-30 * rr0) break;  // flat direction: keep the iterate so far
        double alpha = rr / pq;
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += alpha * pk[i];
        double rr_new = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] -= alpha * q[i];
            rr_new += r[i] * r[i];
        }
        if (rr_new <= rel_tol * rel_tol * rr0) break;
        double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < pk.size(); ++i) pk[i] = r[i] + beta * pk[i];
    }
    return d;
}

void jacobi_smooth(std::vector<double>& v, int n, int m, int sweeps) {
    std::size_t stride[3] = {1, static_cast<std::size_t>(m),
                             static_cast<std::size_t>(m) * static_cast<std::size_t>(m)};
    std::vector<double> next(v.size());
    for (int s = 0; s < sweeps; ++s) {
        for (std::size_t c = 0; c < v.size(); ++c) {
            double acc = 0.0;
            int cnt = 0;
            std::size_t rem = c;
            int coord[3] = {0, 0, 0};
            for (int d = 0; d < n; ++d) {
                coord[d] = static_cast<int>(rem % static_cast<std::size_t>(m));
                rem /= static_cast<std::size_t>(m);
            }
            for (int d = 0; d < n; ++d) {
                if (coord[d] > 0) {
                    acc += v[c - stride[d]];
                    ++cnt;
                }
                if (coord[d] + 1 < m) {
                    acc += v[c + stride[d]];
                    ++cnt;
                }
            }
            // damped average keeps the center so point masses diffuse
            // without the parity flip of a pure neighbor average
            next[c] = (v[c] + acc) / (1.0 + cnt);
        }
        v.swap(next);
    }
}

}  // namespace

double energy(const GridField& u, const Exponent& e) {
    return energy_raw(u.values(), u.dim(), u.resolution(), u.spacing(), e.p());
}

void energy_and_gradient(const GridField& u, const Exponent& e, double& value,
                         std::vector<double>& grad) {
    value = energy_and_gradient_raw(u.values(), u.dim(), u.resolution(), u.spacing(), e.p(), grad);
}

GridField energy_gradient(const GridField& u, const Exponent& e) {
    std::vector<double> grad;
    energy_and_gradient_raw(u.values(), u.dim(), u.resolution(), u.spacing(), e.p(), grad);
    return GridField(u.dim(), u.half_width(), u.resolution(), std::move(grad), u.farfield_mode());
}

double el_residual(const GridField& u, const Splat& m, double c, const Exponent& e) {
    std::vector<double> grad;
    energy_and_gradient_raw(u.values(), u.dim(), u.resolution(), u.spacing(), e.p(), grad);
    const double p = e.p();
    for (double& g : grad) g /= p;
    for (const auto& [k, w] : m.weights()) grad[k] -= c * w;
    double worst = 0.0;
    for (double g : grad) worst = std::max(worst, std::abs(g));
    return worst / std::abs(c);
}

ExtremalResult minimize(const SignedMeasure& mu, const Exponent& e, const GridSpec& grid_spec,
                        const SolverConfig& cfg, const std::optional<SearchConfig>& search) {
    if (e.n() < 2)
        throw ValidationError(ErrorCode::DimensionNotOne, "grid solver needs n >= 2");
    if (!(e.p() > 2.0))
        throw ValidationError(ErrorCode::InvalidExponent, "grid solver requires p > 2");
    const int n = e.n();
    const int mres = grid_spec.resolution;
    if (!(grid_spec.half_width > 2.0 * mu.support_radius()))
        throw ValidationError(ErrorCode::AtomOutsideBox,
                              "grid needs L > 2 * support_radius(mu)");
    GridField u(n, grid_spec.half_width, mres, GridField::FarField::Clamp);
    const double h = u.spacing();
    Splat m(mu, u);

    std::vector<double>& v = u.values();
    if (cfg.random_init) {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        int attempts = 0;
        do {
            for (double& x : v) x = dist(rng);
            ++attempts;
        } while (std::abs(m.pair(v)) < 1e-14 && attempts < 16);
    } else {
        for (const auto& [k, w] : m.weights()) v[k] = w;
        jacobi_smooth(v, n, mres, cfg.jacobi_sweeps);
        if (std::abs(m.pair(v)) < 1e-12) {
            // smoothing can cancel the pairing; the raw splat never does
            std::fill(v.begin(), v.end(), 0.0);
            for (const auto& [k, w] : m.weights()) v[k] = w;
        }
    }
    double s0 = m.pair(v);
    if (std::abs(s0) < 1e-14)
        throw SolverError(SolverErrorCode::ConstraintDegenerate,
                          "initial iterate pairs to zero against the measure");
    for (double& x : v) x /= s0;

    const double p = e.p();
    std::vector<double> grad;
    double E = energy_and_gradient_raw(v, n, mres, h, p, grad);

    double max_abs_m = 0.0;
    for (const auto& [k, w] : m.weights()) max_abs_m = std::max(max_abs_m, std::abs(w));

    std::vector<double> dir(v.size()), trial(v.size());
    std::vector<double> history;
    history.reserve(4096);
    history.push_back(E);

    long it = 0;
    bool converged = false;

    // Gradient of the scale-invariant quotient E(u)/<m,u>^p at <m,u> = 1;
    // its zeros are exactly the discrete EL solutions.
    auto reduced_gradient = [&] {
        dir = grad;
        for (const auto& [k, w] : m.weights()) dir[k] -= p * E * w;
    };

    // Backtracking on the normalized energy along -d (halve until decrease);
    // rescales onto the constraint slice. Returns the accepted step or 0.
    auto line_search = [&](const std::vector<double>& d, double alpha) {
        for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
            for (std::size_t i = 0; i < v.size(); ++i) trial[i] = v[i] - alpha * d[i];
            double s = m.pair(trial);
            if (std::abs(s) >= 1e-14) {
                // energy after rescale via p-homogeneity: E(trial)/|s|^p
                double et = energy_raw(trial, n, mres, h, p) / std::pow(std::abs(s), p);
                if (et < E) {
                    for (std::size_t i = 0; i < v.size(); ++i) v[i] = trial[i] / s;
                    E = et;
                    return alpha;
                }
            }
            alpha *= 0.5;
        }
        return 0.0;
    };

    auto stagnated = [&] {
        history.push_back(E);
        int w = cfg.stop_window;
        if (static_cast<int>(history.size()) > w) {
            double past = history[history.size() - 1 - static_cast<std::size_t>(w)];
            if (past - E < cfg.tol_stop * std::max(E, 1e-300)) return true;
        }
        return false;
    };

    // Phase 1: Barzilai-Borwein descent. Cheap global progress; the
    // degenerate cells make its tail convergence slow, so it hands over to
    // the Newton refinement once the budget or the window criterion hits.
    {
        std::vector<double> prev_v, prev_dir;
        double step = 0.0;
        long budget = std::min(cfg.max_iterations, cfg.descent_iterations);
        for (; it < budget; ++it) {
            reduced_gradient();
            double dir_sq = 0.0;
            for (double d : dir) dir_sq += d * d;
            if (dir_sq == 0.0) {
                converged = true;
                break;
            }
            if (step <= 0.0) {
                double gmax = 0.0;
                for (double d : dir) gmax = std::max(gmax, std::abs(d));
                step = gmax > 0.0 ? 1.0 / (p * gmax) : 1.0;
            } else if (!prev_v.empty()) {
                double ss = 0.0, sy = 0.0;
                for (std::size_t i = 0; i < v.size(); ++i) {
                    double sv = v[i] - prev_v[i];
                    double yv = dir[i] - prev_dir[i];
                    ss += sv * sv;
                    sy += sv * yv;
                }
                if (sy > 0.0 && ss > 0.0) step = ss / sy;
            }
            prev_v = v;
            prev_dir = dir;
            double accepted = line_search(dir, step);
            if (accepted == 0.0) break;  // floor: let the Newton phase decide
            step = accepted;
            E = energy_and_gradient_raw(v, n, mres, h, p, grad);
            if (stagnated()) {
                converged = true;
                ++it;
                break;
            }
        }
    }

    // Phase 2: Newton refinement under the same monotone line-search-and-
    // rescale contract. n = 2 solves the banded Hessian directly (with a
    // Levenberg shift against flat cells); n = 3 falls back to truncated CG.
    if (!converged) {
        const bool debug = std::getenv("MORREY_SOLVER_DEBUG") != nullptr;
        BandedHessian banded;
        double shift_scale = 0.0;
        for (int outer = 0; outer < 200 && it < cfg.max_iterations; ++outer, ++it) {
            E = energy_and_gradient_raw(v, n, mres, h, p, grad);
            reduced_gradient();
            double gmax = 0.0;
            for (double d : dir) gmax = std::max(gmax, std::abs(d));
            double force_scale = p * E * std::max(max_abs_m, 1e-300);
            if (gmax <= 1e-14 * force_scale) {
                converged = true;
                break;
            }
            std::vector<double> nd;
            if (n == 2) {
                if (shift_scale == 0.0) {
                    banded.assemble(v, mres, h, p, 0.0);
                    double dmax = 0.0;
                    for (int c = 0; c < banded.n; ++c)
                        dmax = std::max(dmax,
                                        banded.band[static_cast<std::size_t>(c) * (banded.bw + 1)]);
                    shift_scale = std::max(dmax, 1e-300);
                }
                double shift = 1e-13 * shift_scale;
                for (int attempt = 0; attempt < 12; ++attempt, shift *= 100.0) {
                    banded.assemble(v, mres, h, p, shift);
                    if (banded.factor()) {
                        nd = banded.solve(dir);
                        break;
                    }
                }
            }
            if (nd.empty()) {
                double forcing = std::min(0.1, std::sqrt(gmax / force_scale));
                nd = cg_direction(v, n, mres, h, p, dir, cfg.cg_max, forcing);
            }
            double acc = line_search(nd, 1.0);
            if (acc == 0.0) {
                double gstep = 1.0 / (p * gmax);
                acc = line_search(dir, gstep);
                if (acc == 0.0) {
                    converged = true;  // numerical floor of both directions
                    break;
                }
            }
            if (debug)
                std::fprintf(stderr, "newton %3d it=%ld E=%.16e gmax=%.3e rel=%.3e step=%.3e\n",
                             outer, it, E, gmax, gmax / force_scale, acc);
            if (stagnated()) {
                converged = true;
                ++it;
                break;
            }
        }
    }
    if (!converged)
        throw SolverError(SolverErrorCode::MaxIterations,
                          "energy descent did not settle within the iteration budget");

    double s_final = m.pair(v);
    if (std::abs(s_final) < 1e-14)
        throw SolverError(SolverErrorCode::ConstraintDegenerate,
                          "constraint pairing collapsed during iteration");
    for (double& x : v) x /= s_final;
    E = energy_and_gradient_raw(v, n, mres, h, p, grad);
    if (cfg.energy_history != nullptr) *cfg.energy_history = history;

    ExtremalResult result{u,  E, E, 0.0, 0.0, Similarity::identity(n),
                          it, el_residual(u, m, E, e)};
    if (cfg.run_seminorm_search) {
        SearchConfig sc = search.value_or(SearchConfig::defaults(u, mu));
        sc.record_trace = false;
        SeminormResult sr = seminorm(u, mu, e, sc);
        result.seminorm_value = sr.value;
        result.maximizer = sr.argmax;
        result.cstar_estimate = sr.value / std::pow(E, 1.0 / p);
    }
    return result;
}

BoundsReport check_bounds(const GridField& u, const SignedMeasure& mu) {
    Splat m(mu, u);
    BoundsReport r;
    const std::vector<double>& v = u.values();
    r.global_min = *std::min_element(v.begin(), v.end());
    r.global_max = *std::max_element(v.begin(), v.end());
    r.support_min = std::numeric_limits<double>::infinity();
    r.support_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k : m.support_nodes()) {
        r.support_min = std::min(r.support_min, v[k]);
        r.support_max = std::max(r.support_max, v[k]);
    }
    r.range = r.global_max - r.global_min;
    r.upper_slack = r.global_max - r.support_max;
    r.lower_slack = r.support_min - r.global_min;
    return r;
}

FarfieldReport farfield_check(const GridField& u, const SignedMeasure& mu) {
    FarfieldReport r;
    const int n = u.dim();
    const int m = u.resolution();
    const std::vector<double>& v = u.values();
    double bmin = std::numeric_limits<double>::infinity();
    double bmax = -bmin;
    double sum = 0.0;
    long count = 0;
    for (std::size_t c = 0; c < v.size(); ++c) {
        std::size_t rem = c;
        bool boundary = false;
        for (int d = 0; d < n; ++d) {
            int coord = static_cast<int>(rem % static_cast<std::size_t>(m));
            rem /= static_cast<std::size_t>(m);
            boundary = boundary || coord == 0 || coord == m - 1;
        }
        if (!boundary) continue;
        bmin = std::min(bmin, v[c]);
        bmax = std::max(bmax, v[c]);
        sum += v[c];
        ++count;
    }
    r.spread = bmax - bmin;
    r.boundary_mean = sum / count;
    r.range = *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end());
    if (mu.size() == 2) {
        r.two_atom = true;
        r.midpoint_value =
            0.5 * (u.value(mu.atoms()[0].location) + u.value(mu.atoms()[1].location));
        r.mean_deviation = std::abs(r.boundary_mean - r.midpoint_value);
    }
    return r;
}

}  // namespace morrey
