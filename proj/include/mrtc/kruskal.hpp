#pragma once

#include <array>
#include <optional>

#include "mrtc/tensor.hpp"

namespace mrtc {

// CP factors of a coupled completion problem: the three fine-mode factors
// plus one auxiliary (coarse-aspect) factor per aggregated mode. aux[m-1] is
// empty when mode m carries no coarse tensor; for the canonical layout
// aux[0] is Q1 and aux[1] is Q2. The snapshot holds the previous outer
// iteration's fine factors, which define the interim tensor.
struct FactorSet {
  Matrix u;  // I1 x R
  Matrix v;  // I2 x R
  Matrix w;  // I3 x R
  std::array<Matrix, 3> aux;

  struct Snapshot {
    Matrix u, v, w;
  };
  std::optional<Snapshot> snapshot;

  index_t rank() const { return u.cols(); }

  Matrix& fine(int mode);
  const Matrix& fine(int mode) const;

  Matrix& q1() { return aux[0]; }
  const Matrix& q1() const { return aux[0]; }
  Matrix& q2() { return aux[1]; }
  const Matrix& q2() const { return aux[1]; }
  Matrix& q3() { return aux[2]; }
  const Matrix& q3() const { return aux[2]; }
};

// Kruskal reconstruction: t(i,j,k) = sum_r u(i,r) v(j,r) w(k,r).
DenseTensor3 reconstruct(const Matrix& u, const Matrix& v, const Matrix& w);

// Norm equilibration: each column r of U, V, W is normalized and multiplied
// by f_r = (|u_r| |v_r| |w_r|)^(1/3). Auxiliary factors are rescaled by the
// same per-column multiplier as their fine aspect (aux of mode m follows the
// mode-m fine factor), so known-aggregation constraints are preserved. The
// reconstruction is unchanged. Throws if any U/V/W column has zero norm.
FactorSet rescale_columns(FactorSet fs);

// Percentage of fitness: 1 - ||target - approx||_F / ||target||_F.
// Throws on shape mismatch or zero-norm target.
double pof(const DenseTensor3& target, const DenseTensor3& approx);

}  // namespace mrtc
