#include "mrtc/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace mrtc {

index_t Shape3::dim(int mode) const {
  switch (mode) {
    case 1: return i1;
    case 2: return i2;
    case 3: return i3;
    default: throw std::invalid_argument("Shape3::dim: mode must be 1, 2 or 3");
  }
}

Shape3 Shape3::with_dim(int mode, index_t n) const {
  Shape3 s = *this;
  switch (mode) {
    case 1: s.i1 = n; break;
    case 2: s.i2 = n; break;
    case 3: s.i3 = n; break;
    default: throw std::invalid_argument("Shape3::with_dim: mode must be 1, 2 or 3");
  }
  return s;
}

DenseTensor3::DenseTensor3(Shape3 shape) : shape_(shape) {
  if (shape.i1 < 0 || shape.i2 < 0 || shape.i3 < 0)
    throw std::invalid_argument("DenseTensor3: negative dimension");
  data_.assign(static_cast<std::size_t>(shape.size()), 0.0);
}

Matrix unfold(const DenseTensor3& t, int mode) {
  const Shape3 s = t.shape();
  switch (mode) {
    case 1: {
      // Row-major storage already has (i; j,k with k fastest) layout.
      Matrix out(s.i1, s.i2 * s.i3);
      for (index_t i = 0; i < s.i1; ++i)
        for (index_t j = 0; j < s.i2; ++j)
          for (index_t k = 0; k < s.i3; ++k) out(i, j * s.i3 + k) = t(i, j, k);
      return out;
    }
    case 2: {
      Matrix out(s.i2, s.i1 * s.i3);
      for (index_t i = 0; i < s.i1; ++i)
        for (index_t j = 0; j < s.i2; ++j)
          for (index_t k = 0; k < s.i3; ++k) out(j, i * s.i3 + k) = t(i, j, k);
      return out;
    }
    case 3: {
      Matrix out(s.i3, s.i1 * s.i2);
      for (index_t i = 0; i < s.i1; ++i)
        for (index_t j = 0; j < s.i2; ++j)
          for (index_t k = 0; k < s.i3; ++k) out(k, i * s.i2 + j) = t(i, j, k);
      return out;
    }
    default:
      throw std::invalid_argument("unfold: mode must be 1, 2 or 3");
  }
}

DenseTensor3 refold(const Matrix& m, int mode, Shape3 shape) {
  if (m.rows() != shape.dim(mode) || m.rows() * m.cols() != shape.size())
    throw std::invalid_argument("refold: matrix size does not match shape");
  DenseTensor3 out(shape);
  switch (mode) {
    case 1:
      for (index_t i = 0; i < shape.i1; ++i)
        for (index_t j = 0; j < shape.i2; ++j)
          for (index_t k = 0; k < shape.i3; ++k) out(i, j, k) = m(i, j * shape.i3 + k);
      return out;
    case 2:
      for (index_t i = 0; i < shape.i1; ++i)
        for (index_t j = 0; j < shape.i2; ++j)
          for (index_t k = 0; k < shape.i3; ++k) out(i, j, k) = m(j, i * shape.i3 + k);
      return out;
    case 3:
      for (index_t i = 0; i < shape.i1; ++i)
        for (index_t j = 0; j < shape.i2; ++j)
          for (index_t k = 0; k < shape.i3; ++k) out(i, j, k) = m(k, i * shape.i2 + j);
      return out;
    default:
      throw std::invalid_argument("refold: mode must be 1, 2 or 3");
  }
}

DenseTensor3 mode_product(const DenseTensor3& t, const Matrix& p, int mode) {
  const Shape3 s = t.shape();
  if (p.cols() != s.dim(mode))
    throw std::invalid_argument("mode_product: p.cols() must equal the mode size");
  const Shape3 out_shape = s.with_dim(mode, p.rows());
  return refold(matmul(p, unfold(t, mode)), mode, out_shape);
}

Matrix mttkrp_dense(const DenseTensor3& t, const Matrix& f1, const Matrix& f2, int mode) {
  const Shape3 s = t.shape();
  if (f1.cols() != f2.cols())
    throw std::invalid_argument("mttkrp_dense: factor column counts differ");
  const index_t r = f1.cols();
  index_t n1 = 0, n2 = 0;
  switch (mode) {
    case 1: n1 = s.i2; n2 = s.i3; break;
    case 2: n1 = s.i1; n2 = s.i3; break;
    case 3: n1 = s.i1; n2 = s.i2; break;
    default: throw std::invalid_argument("mttkrp_dense: mode must be 1, 2 or 3");
  }
  if (f1.rows() != n1 || f2.rows() != n2)
    throw std::invalid_argument("mttkrp_dense: factor rows do not match tensor shape");

  Matrix out(s.dim(mode), r);
  for (index_t i = 0; i < s.i1; ++i)
    for (index_t j = 0; j < s.i2; ++j)
      for (index_t k = 0; k < s.i3; ++k) {
        const double v = t(i, j, k);
        if (v == 0.0) continue;
        double* dst = nullptr;
        const double* a = nullptr;
        const double* b = nullptr;
        switch (mode) {
          case 1: dst = out.row(i); a = f1.row(j); b = f2.row(k); break;
          case 2: dst = out.row(j); a = f1.row(i); b = f2.row(k); break;
          default: dst = out.row(k); a = f1.row(i); b = f2.row(j); break;
        }
        for (index_t c = 0; c < r; ++c) dst[c] += v * a[c] * b[c];
      }
  return out;
}

double frobenius_norm(const DenseTensor3& t) {
  double acc = 0.0;
  for (double v : t.data()) acc += v * v;
  return std::sqrt(acc);
}

double frobenius_norm_diff(const DenseTensor3& a, const DenseTensor3& b) {
  if (!(a.shape() == b.shape()))
    throw std::invalid_argument("frobenius_norm_diff: shape mismatch");
  double acc = 0.0;
  for (std::size_t n = 0; n < a.data().size(); ++n) {
    const double d = a.data()[n] - b.data()[n];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace mrtc
