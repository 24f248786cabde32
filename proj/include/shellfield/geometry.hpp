#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

// Small fixed-capacity vectors/matrices for spacetime dimensions d in {2,3,4},
// metric signature (+,-,...,-), time component first.

namespace shellfield {

using Real = double;
using Complex = std::complex<double>;

inline constexpr int kMaxDim = 4;
inline constexpr Real kPi = 3.14159265358979323846;
inline constexpr Real kTwoPi = 2.0 * kPi;

class Vec {
  public:
    Vec() : dim_(0), v_{} {}
    explicit Vec(int dim, Real fill = 0.0) : dim_(dim), v_{} {
        check_dim(dim);
        for (int i = 0; i < dim_; ++i) v_[i] = fill;
    }
    Vec(std::initializer_list<Real> xs) : dim_(static_cast<int>(xs.size())), v_{} {
        check_dim(dim_);
        int i = 0;
        for (Real x : xs) v_[i++] = x;
    }

    int dim() const { return dim_; }
    Real operator[](int i) const { return v_[static_cast<size_t>(i)]; }
    Real& operator[](int i) { return v_[static_cast<size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < dim_; ++i) v_[i] += o.v_[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < dim_; ++i) v_[i] -= o.v_[i];
        return *this;
    }
    Vec& operator*=(Real s) {
        for (int i = 0; i < dim_; ++i) v_[i] *= s;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(Real s, Vec a) { return a *= s; }
    friend Vec operator-(const Vec& a) {
        Vec r(a.dim());
        for (int i = 0; i < a.dim(); ++i) r[i] = -a[i];
        return r;
    }

    friend bool operator==(const Vec& a, const Vec& b) {
        if (a.dim_ != b.dim_) return false;
        for (int i = 0; i < a.dim_; ++i)
            if (a.v_[i] != b.v_[i]) return false;
        return true;
    }

  private:
    static void check_dim(int d) {
        if (d < 0 || d > kMaxDim) throw std::invalid_argument("Vec: dimension out of range");
    }
    int dim_;
    std::array<Real, kMaxDim> v_;
};

// Euclidean dot.
inline Real dot(const Vec& a, const Vec& b) {
    Real s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

// Minkowski pairing a.b = a0 b0 - sum_i ai bi.
inline Real minkowski(const Vec& a, const Vec& b) {
    Real s = a[0] * b[0];
    for (int i = 1; i < a.dim(); ++i) s -= a[i] * b[i];
    return s;
}

// Flip spatial signs: (a0, a_vec) -> (a0, -a_vec). Lowers/raises an index.
inline Vec eta_apply(const Vec& a) {
    Vec r = a;
    for (int i = 1; i < r.dim(); ++i) r[i] = -r[i];
    return r;
}

inline Real metric_sign(int mu) { return mu == 0 ? 1.0 : -1.0; }

struct SpacetimePoint {
    Vec coords;  // (t, x1, ..., x_{d-1}), natural units c = 1
    int dim() const { return coords.dim(); }
};

struct WaveVector {
    Vec coords;  // (k0, k1, ..., k_{d-1})
    int dim() const { return coords.dim(); }
};

class Mat {
  public:
    Mat() : dim_(0), m_{} {}
    explicit Mat(int dim, Real diag = 0.0) : dim_(dim), m_{} {
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) at(i, j) = (i == j) ? diag : 0.0;
    }
    static Mat identity(int dim) { return Mat(dim, 1.0); }

    static Mat diagonal(const Vec& d) {
        Mat r(d.dim());
        for (int i = 0; i < d.dim(); ++i) r.at(i, i) = d[i];
        return r;
    }

    // Proper orthochronous boost in the (t, axis) plane; axis in [1, d-1].
    static Mat boost(int dim, int axis, Real rapidity) {
        if (axis < 1 || axis >= dim) throw std::invalid_argument("boost: axis out of range");
        Mat r = identity(dim);
        const Real ch = std::cosh(rapidity), sh = std::sinh(rapidity);
        r.at(0, 0) = ch;
        r.at(0, axis) = sh;
        r.at(axis, 0) = sh;
        r.at(axis, axis) = ch;
        return r;
    }

    int dim() const { return dim_; }
    Real& at(int i, int j) { return m_[static_cast<size_t>(i * kMaxDim + j)]; }
    Real at(int i, int j) const { return m_[static_cast<size_t>(i * kMaxDim + j)]; }

    Vec apply(const Vec& x) const {
        Vec r(dim_);
        for (int i = 0; i < dim_; ++i) {
            Real s = 0.0;
            for (int j = 0; j < dim_; ++j) s += at(i, j) * x[j];
            r[i] = s;
        }
        return r;
    }

    Mat transpose() const {
        Mat r(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) r.at(i, j) = at(j, i);
        return r;
    }

    friend Mat operator*(const Mat& a, const Mat& b) {
        Mat r(a.dim_);
        for (int i = 0; i < a.dim_; ++i)
            for (int j = 0; j < a.dim_; ++j) {
                Real s = 0.0;
                for (int k = 0; k < a.dim_; ++k) s += a.at(i, k) * b.at(k, j);
                r.at(i, j) = s;
            }
        return r;
    }

    // Gaussian elimination with partial pivoting; fine at d <= 4.
    Mat inverse() const {
        const int n = dim_;
        std::array<std::array<Real, 2 * kMaxDim>, kMaxDim> a{};
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) a[i][j] = at(i, j);
            for (int j = 0; j < n; ++j) a[i][n + j] = (i == j) ? 1.0 : 0.0;
        }
        for (int col = 0; col < n; ++col) {
            int piv = col;
            for (int r = col + 1; r < n; ++r)
                if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
            if (a[piv][col] == 0.0) throw std::runtime_error("Mat::inverse: singular matrix");
            std::swap(a[piv], a[col]);
            const Real inv = 1.0 / a[col][col];
            for (int j = 0; j < 2 * n; ++j) a[col][j] *= inv;
            for (int r = 0; r < n; ++r) {
                if (r == col) continue;
                const Real f = a[r][col];
                if (f == 0.0) continue;
                for (int j = 0; j < 2 * n; ++j) a[r][j] -= f * a[col][j];
            }
        }
        Mat out(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out.at(i, j) = a[i][n + j];
        return out;
    }

    Real det() const {
        const int n = dim_;
        std::array<std::array<Real, kMaxDim>, kMaxDim> a{};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a[i][j] = at(i, j);
        Real d = 1.0;
        for (int col = 0; col < n; ++col) {
            int piv = col;
            for (int r = col + 1; r < n; ++r)
                if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
            if (a[piv][col] == 0.0) return 0.0;
            if (piv != col) {
                std::swap(a[piv], a[col]);
                d = -d;
            }
            d *= a[col][col];
            for (int r = col + 1; r < n; ++r) {
                const Real f = a[r][col] / a[col][col];
                for (int j = col; j < n; ++j) a[r][j] -= f * a[col][j];
            }
        }
        return d;
    }

    friend bool operator==(const Mat& a, const Mat& b) {
        if (a.dim_ != b.dim_) return false;
        for (int i = 0; i < a.dim_; ++i)
            for (int j = 0; j < a.dim_; ++j)
                if (a.at(i, j) != b.at(i, j)) return false;
        return true;
    }

  private:
    int dim_;
    std::array<Real, kMaxDim * kMaxDim> m_;
};

}  // namespace shellfield
