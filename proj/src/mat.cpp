#include "synclab/mat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "synclab/errors.hpp"

namespace synclab {

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    a_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw error("ragged matrix initializer");
        a_.insert(a_.end(), r.begin(), r.end());
    }
}

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::operator*(const Mat& o) const {
    if (cols_ != o.rows_) throw error("matrix product shape mismatch");
    Mat r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < o.cols_; ++j)
                r(i, j) += aik * o(k, j);
        }
    return r;
}

Vec Mat::operator*(const Vec& v) const {
    if (cols_ != v.size()) throw error("matrix-vector shape mismatch");
    Vec r(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

Mat Mat::operator+(const Mat& o) const {
    Mat r = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
    return r;
}

Mat Mat::operator-(const Mat& o) const {
    Mat r = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
    return r;
}

Mat Mat::operator*(double s) const {
    Mat r = *this;
    for (auto& v : r.a_) v *= s;
    return r;
}

Mat Mat::transpose() const {
    Mat r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

Mat Mat::slice(const std::vector<std::size_t>& ri,
               const std::vector<std::size_t>& ci) const {
    Mat r(ri.size(), ci.size());
    for (std::size_t i = 0; i < ri.size(); ++i)
        for (std::size_t j = 0; j < ci.size(); ++j) r(i, j) = (*this)(ri[i], ci[j]);
    return r;
}

double Mat::frobenius() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

double Mat::max_abs() const {
    double s = 0.0;
    for (double v : a_) s = std::max(s, std::abs(v));
    return s;
}

Lu::Lu(const Mat& m) : n_(m.rows()), lu_(m), piv_(m.rows()) {
    if (m.rows() != m.cols()) throw error("LU requires a square matrix");
    for (std::size_t i = 0; i < n_; ++i) piv_[i] = i;
    for (std::size_t k = 0; k < n_; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n_; ++i)
            if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
        if (p != k) {
            for (std::size_t j = 0; j < n_; ++j) std::swap(lu_(p, j), lu_(k, j));
            std::swap(piv_[p], piv_[k]);
            sign_ = -sign_;
        }
        const double pivot = lu_(k, k);
        if (pivot == 0.0) { singular_ = true; continue; }
        for (std::size_t i = k + 1; i < n_; ++i) {
            lu_(i, k) /= pivot;
            const double f = lu_(i, k);
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n_; ++j) lu_(i, j) -= f * lu_(k, j);
        }
    }
}

double Lu::det() const {
    double d = sign_;
    for (std::size_t i = 0; i < n_; ++i) d *= lu_(i, i);
    return d;
}

Vec Lu::solve(const Vec& b) const {
    if (singular_) throw error("LU solve on singular matrix");
    if (b.size() != n_) throw error("LU solve shape mismatch");
    Vec x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = b[piv_[i]];
    for (std::size_t i = 1; i < n_; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (std::size_t ii = n_; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n_; ++j) x[ii] -= lu_(ii, j) * x[j];
        x[ii] /= lu_(ii, ii);
    }
    return x;
}

Mat Lu::inverse() const {
    Mat r(n_, n_);
    Vec e(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        Vec col = solve(e);
        for (std::size_t i = 0; i < n_; ++i) r(i, j) = col[i];
    }
    return r;
}

Vec sym_eigenvalues(Mat s) {
    const std::size_t n = s.rows();
    // Cyclic Jacobi sweeps; quadratic convergence makes 50 sweeps plenty at
    // these sizes.
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += s(i, j) * s(i, j);
        if (off < 1e-30 * (1.0 + s.frobenius())) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (s(p, q) == 0.0) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double skp = s(k, p), skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double spk = s(p, k), sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
            }
    }
    Vec ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = s(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

double cond2(const Mat& m) {
    Vec ev = sym_eigenvalues(m.transpose() * m);
    const double lo = std::max(ev.front(), 0.0), hi = std::max(ev.back(), 0.0);
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(hi / lo);
}

double norm2(const Mat& m) {
    Vec ev = sym_eigenvalues(m.transpose() * m);
    return std::sqrt(std::max(ev.back(), 0.0));
}

}  // namespace synclab
