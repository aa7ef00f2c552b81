#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace morrey {

// Points, orthogonal matrices and boxes in R^n for n = 1, 2, 3. The
// dimension travels with the value so 1D and nD code share one path.

class Vec {
public:
    Vec() : n_(0), c_{0.0, 0.0, 0.0} {}
    explicit Vec(int n, double fill = 0.0) : n_(n), c_{fill, fill, fill} {
        check_dim(n);
    }
    Vec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())), c_{0, 0, 0} {
        check_dim(n_);
        int i = 0;
        for (double x : xs) c_[i++] = x;
    }

    int dim() const { return n_; }
    double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

    Vec operator+(const Vec& o) const {
        Vec r(n_);
        for (int i = 0; i < n_; ++i) r[i] = c_[i] + o[i];
        return r;
    }
    Vec operator-(const Vec& o) const {
        Vec r(n_);
        for (int i = 0; i < n_; ++i) r[i] = c_[i] - o[i];
        return r;
    }
    Vec operator*(double t) const {
        Vec r(n_);
        for (int i = 0; i < n_; ++i) r[i] = c_[i] * t;
        return r;
    }
    Vec operator-() const { return *this * -1.0; }
    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n_; ++i) c_[i] += o[i];
        return *this;
    }

    double dot(const Vec& o) const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += c_[i] * o[i];
        return s;
    }
    double norm_sq() const { return dot(*this); }
    double norm() const { return std::sqrt(norm_sq()); }

    double max_abs() const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s = std::max(s, std::abs(c_[i]));
        return s;
    }

    static void check_dim(int n) {
        if (n < 1 || n > 3) throw std::invalid_argument("Vec: dimension must be 1, 2 or 3");
    }

private:
    int n_;
    std::array<double, 3> c_;
};

inline Vec operator*(double t, const Vec& v) { return v * t; }

inline double distance(const Vec& a, const Vec& b) { return (a - b).norm(); }

// Row-major n-by-n matrix, n <= 3.
class Mat {
public:
    Mat() : n_(0), a_{} {}
    explicit Mat(int n) : n_(n), a_{} { Vec::check_dim(n); }

    static Mat identity(int n) {
        Mat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return n_; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * n_ + j)]; }

    Vec operator*(const Vec& v) const {
        Vec r(n_);
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (int j = 0; j < n_; ++j) s += (*this)(i, j) * v[j];
            r[i] = s;
        }
        return r;
    }
    Mat operator*(const Mat& o) const {
        Mat r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                double s = 0.0;
                for (int k = 0; k < n_; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }

    Mat transposed() const {
        Mat r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r(i, j) = (*this)(j, i);
        return r;
    }

    double det() const {
        switch (n_) {
            case 1: return (*this)(0, 0);
            case 2: return (*this)(0, 0) * (*this)(1, 1) - (*this)(0, 1) * (*this)(1, 0);
            default:
                return (*this)(0, 0) * ((*this)(1, 1) * (*this)(2, 2) - (*this)(1, 2) * (*this)(2, 1))
                     - (*this)(0, 1) * ((*this)(1, 0) * (*this)(2, 2) - (*this)(1, 2) * (*this)(2, 0))
                     + (*this)(0, 2) * ((*this)(1, 0) * (*this)(2, 1) - (*this)(1, 1) * (*this)(2, 0));
        }
    }

    // max-norm of O^T O - I; zero exactly for orthogonal matrices
    double orthogonality_defect() const {
        Mat g = transposed() * (*this);
        double d = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) d = std::max(d, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
        return d;
    }

private:
    int n_;
    std::array<double, 9> a_;
};

// Axis-aligned box; degenerate (lo == hi on an axis) boxes are allowed.
struct Box {
    Vec lo, hi;

    int dim() const { return lo.dim(); }
    double diameter() const { return (hi - lo).norm(); }
    bool contains(const Vec& x, double slack = 0.0) const {
        for (int i = 0; i < lo.dim(); ++i)
            if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
        return true;
    }
    Vec clamp(const Vec& x) const {
        Vec r = x;
        for (int i = 0; i < lo.dim(); ++i) r[i] = std::min(std::max(r[i], lo[i]), hi[i]);
        return r;
    }
};

// |s|^e with sign(s), safe for s == 0 and any e > 0.
inline double signed_pow(double s, double e) {
    if (s == 0.0) return 0.0;
    double m = std::pow(std::abs(s), e);
    return s > 0.0 ? m : -m;
}

// |s|^e * dx evaluated in log space when the intermediate power would
// overflow or underflow.
inline double pow_abs_times(double s, double e, double dx) {
    double a = std::abs(s);
    if (a == 0.0 || dx == 0.0) return 0.0;
    double le = e * std::log(a);
    if (le > -700.0 && le < 700.0) return std::pow(a, e) * dx;
    double t = le + std::log(dx);
    if (t >= 709.8) return std::numeric_limits<double>::infinity();
    if (t <= -745.0) return 0.0;
    return std::exp(t);
}

}  // namespace morrey
