#include "mrtc/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace mrtc {

Matrix::Matrix(index_t rows, index_t cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
  data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const index_t r = static_cast<index_t>(rows.size());
  const index_t c = r == 0 ? 0 : static_cast<index_t>(rows.begin()->size());
  Matrix m(r, c);
  index_t i = 0;
  for (const auto& row : rows) {
    if (static_cast<index_t>(row.size()) != c)
      throw std::invalid_argument("Matrix::from_rows: ragged rows");
    index_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

void Matrix::fill(double value) {
  for (double& v : data_) v = value;
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("khatri_rao: column counts differ");
  const index_t r = a.cols();
  Matrix out(a.rows() * b.rows(), r);
  for (index_t ia = 0; ia < a.rows(); ++ia) {
    for (index_t ib = 0; ib < b.rows(); ++ib) {
      double* dst = out.row(ia * b.rows() + ib);
      const double* ra = a.row(ia);
      const double* rb = b.row(ib);
      for (index_t c = 0; c < r; ++c) dst[c] = ra[c] * rb[c];
    }
  }
  return out;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (index_t i = 0; i < a.rows(); ++i)
    for (index_t j = 0; j < a.cols(); ++j) {
      const double s = a(i, j);
      for (index_t k = 0; k < b.rows(); ++k)
        for (index_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = s * b(k, l);
    }
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("hadamard: shape mismatch");
  Matrix out(a.rows(), a.cols());
  for (std::size_t n = 0; n < a.data().size(); ++n) out.data()[n] = a.data()[n] * b.data()[n];
  return out;
}

Matrix gram(const Matrix& a) {
  const index_t r = a.cols();
  Matrix out(r, r);
  for (index_t i = 0; i < a.rows(); ++i) {
    const double* row = a.row(i);
    for (index_t p = 0; p < r; ++p) {
      const double v = row[p];
      double* dst = out.row(p);
      for (index_t q = 0; q < r; ++q) dst[q] += v * row[q];
    }
  }
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  for (index_t i = 0; i < a.rows(); ++i) {
    double* dst = out.row(i);
    for (index_t k = 0; k < a.cols(); ++k) {
      const double v = a(i, k);
      if (v == 0.0) continue;
      const double* rb = b.row(k);
      for (index_t j = 0; j < b.cols(); ++j) dst[j] += v * rb[j];
    }
  }
  return out;
}

Matrix matmul_transposed_left(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("matmul_transposed_left: row counts differ");
  Matrix out(a.cols(), b.cols());
  for (index_t i = 0; i < a.rows(); ++i) {
    const double* ra = a.row(i);
    const double* rb = b.row(i);
    for (index_t p = 0; p < a.cols(); ++p) {
      const double v = ra[p];
      if (v == 0.0) continue;
      double* dst = out.row(p);
      for (index_t q = 0; q < b.cols(); ++q) dst[q] += v * rb[q];
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (index_t i = 0; i < a.rows(); ++i)
    for (index_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix scaled(const Matrix& a, double s) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t n = 0; n < a.data().size(); ++n) out.data()[n] = s * a.data()[n];
  return out;
}

void add_scaled(Matrix& y, double alpha, const Matrix& x) {
  if (!y.same_shape(x)) throw std::invalid_argument("add_scaled: shape mismatch");
  for (std::size_t n = 0; n < y.data().size(); ++n) y.data()[n] += alpha * x.data()[n];
}

double column_norm(const Matrix& a, index_t col) {
  double acc = 0.0;
  for (index_t i = 0; i < a.rows(); ++i) acc += a(i, col) * a(i, col);
  return std::sqrt(acc);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t n = 0; n < a.data().size(); ++n)
    m = std::max(m, std::fabs(a.data()[n] - b.data()[n]));
  return m;
}

}  // namespace mrtc
