#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace mrtc {

using index_t = std::int64_t;

// Dense row-major matrix of doubles. Sized once at construction; all entries
// zero-initialized. Indices are 0-based in memory (the 1-based convention of
// the file formats is translated at the I/O boundary).
class Matrix {
 public:
  Matrix() = default;
  Matrix(index_t rows, index_t cols);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  index_t rows() const { return rows_; }
  index_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(index_t i, index_t j) { return data_[i * cols_ + j]; }
  double operator()(index_t i, index_t j) const { return data_[i * cols_ + j]; }

  double* row(index_t i) { return data_.data() + i * cols_; }
  const double* row(index_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void fill(double value);
  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  index_t rows_ = 0;
  index_t cols_ = 0;
  std::vector<double> data_;
};

// Column-wise Kronecker product; requires equal column counts.
Matrix khatri_rao(const Matrix& a, const Matrix& b);

// Full Kronecker product, block (i,j) = a(i,j) * b.
Matrix kronecker(const Matrix& a, const Matrix& b);

// Elementwise product; requires equal shapes.
Matrix hadamard(const Matrix& a, const Matrix& b);

// a^T a (cols x cols).
Matrix gram(const Matrix& a);

// a * b and a^T * b.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_transposed_left(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

Matrix scaled(const Matrix& a, double s);

// y += alpha * x, in place; requires equal shapes.
void add_scaled(Matrix& y, double alpha, const Matrix& x);

double column_norm(const Matrix& a, index_t col);

double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace mrtc
