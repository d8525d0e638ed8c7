#pragma once

#include <vector>

#include "mrtc/tensor.hpp"

namespace mrtc {

struct CooEntry {
  index_t i = 0;  // 0-based in memory; file formats are 1-based
  index_t j = 0;
  index_t k = 0;
  double value = 0.0;
};

// Coordinate list of observed tensor entries. Represents the mask and the
// masked data jointly: a stored coordinate is an observed position. Entries
// are kept sorted by (i,j,k); construction rejects out-of-range indices,
// duplicates and non-finite values.
class CooObservations {
 public:
  CooObservations() = default;
  CooObservations(Shape3 shape, std::vector<CooEntry> entries);

  Shape3 shape() const { return shape_; }
  const std::vector<CooEntry>& entries() const { return entries_; }
  index_t size() const { return static_cast<index_t>(entries_.size()); }
  bool empty() const { return entries_.empty(); }

 private:
  Shape3 shape_;
  std::vector<CooEntry> entries_;
};

// Same value as mttkrp_dense on the densified observations, computed from the
// stored coordinates only. f1, f2 are the non-target-mode factors in mode
// order; deterministic (fixed accumulation order).
Matrix mttkrp_sparse(const CooObservations& obs, const Matrix& f1, const Matrix& f2, int mode);

// Low-rank reconstruction sampled at the stored coordinates: each value is
// replaced by sum_r u(i,r) v(j,r) w(k,r). Coordinates are unchanged.
CooObservations masked_reconstruction(const CooObservations& mask_coords, const Matrix& u,
                                      const Matrix& v, const Matrix& w);

// Dense tensor with stored entries placed and everything else zero.
DenseTensor3 densify(const CooObservations& obs);

}  // namespace mrtc
