#include "mrtc/kruskal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrtc {

Matrix& FactorSet::fine(int mode) {
  switch (mode) {
    case 1: return u;
    case 2: return v;
    case 3: return w;
    default: throw std::invalid_argument("FactorSet::fine: mode must be 1, 2 or 3");
  }
}

const Matrix& FactorSet::fine(int mode) const {
  return const_cast<FactorSet*>(this)->fine(mode);
}

DenseTensor3 reconstruct(const Matrix& u, const Matrix& v, const Matrix& w) {
  if (u.cols() != v.cols() || v.cols() != w.cols())
    throw std::invalid_argument("reconstruct: factor column counts differ");
  const index_t r = u.cols();
  DenseTensor3 out({u.rows(), v.rows(), w.rows()});
  std::vector<double> uv(static_cast<std::size_t>(r));
  for (index_t i = 0; i < u.rows(); ++i) {
    const double* ru = u.row(i);
    for (index_t j = 0; j < v.rows(); ++j) {
      const double* rv = v.row(j);
      for (index_t c = 0; c < r; ++c) uv[c] = ru[c] * rv[c];
      for (index_t k = 0; k < w.rows(); ++k) {
        const double* rw = w.row(k);
        double acc = 0.0;
        for (index_t c = 0; c < r; ++c) acc += uv[c] * rw[c];
        out(i, j, k) = acc;
      }
    }
  }
  return out;
}

FactorSet rescale_columns(FactorSet fs) {
  const index_t r = fs.rank();
  if (fs.v.cols() != r || fs.w.cols() != r)
    throw std::invalid_argument("rescale_columns: factor column counts differ");
  for (index_t c = 0; c < r; ++c) {
    const double nu = column_norm(fs.u, c);
    const double nv = column_norm(fs.v, c);
    const double nw = column_norm(fs.w, c);
    if (nu == 0.0 || nv == 0.0 || nw == 0.0)
      throw std::invalid_argument("rescale_columns: zero-norm column " + std::to_string(c + 1));
    const double f = std::cbrt(nu * nv * nw);
    const double mu = f / nu;  // multiplier applied to U's column
    const double mv = f / nv;
    const double mw = f / nw;
    for (index_t i = 0; i < fs.u.rows(); ++i) fs.u(i, c) *= mu;
    for (index_t i = 0; i < fs.v.rows(); ++i) fs.v(i, c) *= mv;
    for (index_t i = 0; i < fs.w.rows(); ++i) fs.w(i, c) *= mw;
    const double maux[3] = {mu, mv, mw};
    for (int m = 0; m < 3; ++m) {
      Matrix& q = fs.aux[m];
      if (q.empty()) continue;
      if (q.cols() != r)
        throw std::invalid_argument("rescale_columns: auxiliary factor column count differs");
      for (index_t i = 0; i < q.rows(); ++i) q(i, c) *= maux[m];
    }
  }
  return fs;
}

double pof(const DenseTensor3& target, const DenseTensor3& approx) {
  if (!(target.shape() == approx.shape()))
    throw std::invalid_argument("pof: shape mismatch");
  const double norm = frobenius_norm(target);
  if (norm == 0.0) throw std::invalid_argument("pof: target has zero norm");
  return 1.0 - frobenius_norm_diff(target, approx) / norm;
}

}  // namespace mrtc
