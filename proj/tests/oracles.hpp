#pragma once

// Brute-force reference implementations used to freeze expected values.
// Everything here recomputes results by direct index enumeration, staying
// independent of the library's computation paths.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mrtc/kruskal.hpp"
#include "mrtc/problem.hpp"
#include "mrtc/rng.hpp"

namespace oracles {

using mrtc::DenseTensor3;
using mrtc::index_t;
using mrtc::Matrix;
using mrtc::Shape3;

inline Matrix random_matrix(mrtc::Rng& rng, index_t rows, index_t cols, bool signed_range = true) {
  Matrix m(rows, cols);
  for (index_t i = 0; i < rows; ++i)
    for (index_t j = 0; j < cols; ++j) m(i, j) = signed_range ? rng.symmetric() : rng.unit();
  return m;
}

inline DenseTensor3 random_tensor(mrtc::Rng& rng, Shape3 shape) {
  DenseTensor3 t(shape);
  for (double& v : t.data()) v = rng.symmetric();
  return t;
}

// Mode-n unfolding by direct enumeration of the index bijection.
inline Matrix unfold_loops(const DenseTensor3& t, int mode) {
  const Shape3 s = t.shape();
  Matrix out(1, 1);
  switch (mode) {
    case 1: out = Matrix(s.i1, s.i2 * s.i3); break;
    case 2: out = Matrix(s.i2, s.i1 * s.i3); break;
    case 3: out = Matrix(s.i3, s.i1 * s.i2); break;
    default: throw std::invalid_argument("unfold_loops: bad mode");
  }
  for (index_t i = 0; i < s.i1; ++i)
    for (index_t j = 0; j < s.i2; ++j)
      for (index_t k = 0; k < s.i3; ++k) {
        if (mode == 1) out(i, j * s.i3 + k) = t(i, j, k);
        if (mode == 2) out(j, i * s.i3 + k) = t(i, j, k);
        if (mode == 3) out(k, i * s.i2 + j) = t(i, j, k);
      }
  return out;
}

inline Matrix kronecker_loops(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (index_t i = 0; i < a.rows(); ++i)
    for (index_t j = 0; j < a.cols(); ++j)
      for (index_t k = 0; k < b.rows(); ++k)
        for (index_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline Matrix khatri_rao_loops(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols());
  for (index_t c = 0; c < a.cols(); ++c)
    for (index_t i = 0; i < a.rows(); ++i)
      for (index_t k = 0; k < b.rows(); ++k) out(i * b.rows() + k, c) = a(i, c) * b(k, c);
  return out;
}

inline Matrix matmul_loops(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (index_t i = 0; i < a.rows(); ++i)
    for (index_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (index_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  return out;
}

inline DenseTensor3 reconstruct_loops(const Matrix& u, const Matrix& v, const Matrix& w) {
  DenseTensor3 out({u.rows(), v.rows(), w.rows()});
  for (index_t i = 0; i < u.rows(); ++i)
    for (index_t j = 0; j < v.rows(); ++j)
      for (index_t k = 0; k < w.rows(); ++k) {
        double acc = 0.0;
        for (index_t r = 0; r < u.cols(); ++r) acc += u(i, r) * v(j, r) * w(k, r);
        out(i, j, k) = acc;
      }
  return out;
}

// Interim tensor assembled densely: observed entries kept, everything else
// filled from the snapshot reconstruction.
inline DenseTensor3 interim_tensor_dense(const mrtc::CompletionProblem& p,
                                         const mrtc::FactorSet::Snapshot& snap) {
  DenseTensor3 filled = reconstruct_loops(snap.u, snap.v, snap.w);
  for (const mrtc::CooEntry& e : p.observations.entries()) filled(e.i, e.j, e.k) = e.value;
  return filled;
}

// Least squares min ||A x - b||_2 per column of b via Householder QR.
inline Matrix qr_least_squares(Matrix a, Matrix b) {
  const index_t m = a.rows();
  const index_t n = a.cols();
  if (b.rows() != m) throw std::invalid_argument("qr_least_squares: row mismatch");
  for (index_t c = 0; c < n; ++c) {
    double norm = 0.0;
    for (index_t i = c; i < m; ++i) norm += a(i, c) * a(i, c);
    norm = std::sqrt(norm);
    if (norm == 0.0) throw std::invalid_argument("qr_least_squares: rank deficient");
    const double alpha = a(c, c) > 0 ? -norm : norm;
    std::vector<double> v(static_cast<std::size_t>(m), 0.0);
    for (index_t i = c; i < m; ++i) v[static_cast<std::size_t>(i)] = a(i, c);
    v[static_cast<std::size_t>(c)] -= alpha;
    double vtv = 0.0;
    for (index_t i = c; i < m; ++i) vtv += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    if (vtv == 0.0) continue;
    for (index_t j = c; j < n; ++j) {
      double dot = 0.0;
      for (index_t i = c; i < m; ++i) dot += v[static_cast<std::size_t>(i)] * a(i, j);
      const double f = 2.0 * dot / vtv;
      for (index_t i = c; i < m; ++i) a(i, j) -= f * v[static_cast<std::size_t>(i)];
    }
    for (index_t j = 0; j < b.cols(); ++j) {
      double dot = 0.0;
      for (index_t i = c; i < m; ++i) dot += v[static_cast<std::size_t>(i)] * b(i, j);
      const double f = 2.0 * dot / vtv;
      for (index_t i = c; i < m; ++i) b(i, j) -= f * v[static_cast<std::size_t>(i)];
    }
  }
  Matrix x(n, b.cols());
  for (index_t j = 0; j < b.cols(); ++j)
    for (index_t i = n - 1; i >= 0; --i) {
      double acc = b(i, j);
      for (index_t k = i + 1; k < n; ++k) acc -= a(i, k) * x(k, j);
      x(i, j) = acc / a(i, i);
    }
  return x;
}

inline double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace oracles
