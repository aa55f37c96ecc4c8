#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace synclab {

using Vec = std::vector<double>;

// Dense row-major matrix.  Dimensions here stay tiny (d <= 8), so no effort
// is spent on blocking or expression templates.
class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}
    Mat(std::initializer_list<std::initializer_list<double>> rows);

    static Mat identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }

    Mat operator*(const Mat& o) const;
    Vec operator*(const Vec& v) const;
    Mat operator+(const Mat& o) const;
    Mat operator-(const Mat& o) const;
    Mat operator*(double s) const;

    Mat transpose() const;

    // Submatrix keeping the given row and column index sets, in order.
    Mat slice(const std::vector<std::size_t>& ri,
              const std::vector<std::size_t>& ci) const;

    double frobenius() const;
    double max_abs() const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

// LU factorization with partial pivoting.  singular() reports an exactly
// zero pivot; near-singular systems are the caller's concern (see cond2).
class Lu {
  public:
    explicit Lu(const Mat& m);
    bool singular() const { return singular_; }
    double det() const;
    Vec solve(const Vec& b) const;
    Mat inverse() const;

  private:
    std::size_t n_;
    Mat lu_;
    std::vector<std::size_t> piv_;
    int sign_ = 1;
    bool singular_ = false;
};

// 2-norm condition number via Jacobi eigenvalues of A^T A.
double cond2(const Mat& m);

// Largest / smallest singular value helpers (same Jacobi path).
double norm2(const Mat& m);

// All eigenvalues of the symmetric matrix s (cyclic Jacobi), ascending.
Vec sym_eigenvalues(Mat s);

}  // namespace synclab
