#include "mrtc/coo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mrtc {

namespace {

std::string coord_string(const CooEntry& e) {
  // 1-based in messages, matching the external data model.
  return "(" + std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) + "," +
         std::to_string(e.k + 1) + ")";
}

}  // namespace

CooObservations::CooObservations(Shape3 shape, std::vector<CooEntry> entries)
    : shape_(shape), entries_(std::move(entries)) {
  if (shape.i1 <= 0 || shape.i2 <= 0 || shape.i3 <= 0)
    throw std::invalid_argument("CooObservations: shape must be positive");
  for (const CooEntry& e : entries_) {
    if (e.i < 0 || e.i >= shape.i1 || e.j < 0 || e.j >= shape.i2 || e.k < 0 || e.k >= shape.i3)
      throw std::invalid_argument("CooObservations: coordinate " + coord_string(e) +
                                  " out of range");
    if (!std::isfinite(e.value))
      throw std::invalid_argument("CooObservations: non-finite value at " + coord_string(e));
  }
  std::sort(entries_.begin(), entries_.end(), [](const CooEntry& a, const CooEntry& b) {
    if (a.i != b.i) return a.i < b.i;
    if (a.j != b.j) return a.j < b.j;
    return a.k < b.k;
  });
  for (std::size_t n = 1; n < entries_.size(); ++n) {
    const CooEntry& a = entries_[n - 1];
    const CooEntry& b = entries_[n];
    if (a.i == b.i && a.j == b.j && a.k == b.k)
      throw std::invalid_argument("CooObservations: duplicate coordinate " + coord_string(b));
  }
}

Matrix mttkrp_sparse(const CooObservations& obs, const Matrix& f1, const Matrix& f2, int mode) {
  const Shape3 s = obs.shape();
  if (f1.cols() != f2.cols())
    throw std::invalid_argument("mttkrp_sparse: factor column counts differ");
  const index_t r = f1.cols();
  index_t n1 = 0, n2 = 0;
  switch (mode) {
    case 1: n1 = s.i2; n2 = s.i3; break;
    case 2: n1 = s.i1; n2 = s.i3; break;
    case 3: n1 = s.i1; n2 = s.i2; break;
    default: throw std::invalid_argument("mttkrp_sparse: mode must be 1, 2 or 3");
  }
  if (f1.rows() != n1 || f2.rows() != n2)
    throw std::invalid_argument("mttkrp_sparse: factor rows do not match tensor shape");

  Matrix out(s.dim(mode), r);
  for (const CooEntry& e : obs.entries()) {
    double* dst = nullptr;
    const double* a = nullptr;
    const double* b = nullptr;
    switch (mode) {
      case 1: dst = out.row(e.i); a = f1.row(e.j); b = f2.row(e.k); break;
      case 2: dst = out.row(e.j); a = f1.row(e.i); b = f2.row(e.k); break;
      default: dst = out.row(e.k); a = f1.row(e.i); b = f2.row(e.j); break;
    }
    for (index_t c = 0; c < r; ++c) dst[c] += e.value * a[c] * b[c];
  }
  return out;
}

CooObservations masked_reconstruction(const CooObservations& mask_coords, const Matrix& u,
                                      const Matrix& v, const Matrix& w) {
  const Shape3 s = mask_coords.shape();
  if (u.cols() != v.cols() || v.cols() != w.cols())
    throw std::invalid_argument("masked_reconstruction: factor column counts differ");
  if (u.rows() != s.i1 || v.rows() != s.i2 || w.rows() != s.i3)
    throw std::invalid_argument("masked_reconstruction: factor rows do not match shape");
  const index_t r = u.cols();
  std::vector<CooEntry> out;
  out.reserve(mask_coords.entries().size());
  for (const CooEntry& e : mask_coords.entries()) {
    const double* ru = u.row(e.i);
    const double* rv = v.row(e.j);
    const double* rw = w.row(e.k);
    double acc = 0.0;
    for (index_t c = 0; c < r; ++c) acc += ru[c] * rv[c] * rw[c];
    out.push_back({e.i, e.j, e.k, acc});
  }
  return CooObservations(s, std::move(out));
}

DenseTensor3 densify(const CooObservations& obs) {
  DenseTensor3 out(obs.shape());
  for (const CooEntry& e : obs.entries()) out(e.i, e.j, e.k) = e.value;
  return out;
}

}  // namespace mrtc
