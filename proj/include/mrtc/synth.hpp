#pragma once

#include <cstdint>
#include <utility>

#include "mrtc/solver.hpp"

namespace mrtc {

// A reproducible low-rank instance: ground truth X = [[U,V,W]] from uniform
// [0,1) factors with V, W column-sorted for mode smoothness, plus two
// contiguous-block aggregation maps and their exact coarse tensors
// C1 = X x_1 P1 and C2 = X x_2 P2.
struct SyntheticInstance {
  DenseTensor3 x;
  Matrix u, v, w;
  AggregationMatrix p1, p2;
  DenseTensor3 coarse1;  // (J, I, I)
  DenseTensor3 coarse2;  // (I, J, I)
  std::uint64_t seed = 0;
};

SyntheticInstance generate_synthetic(index_t rank = 10, index_t mode_size = 125,
                                     index_t coarse_size = 12, std::uint64_t seed = 0);

// floor(fraction * I1 I2 I3) distinct coordinates drawn uniformly without
// replacement, values copied from x. fraction must lie in (0, 1].
CooObservations sample_mask(const DenseTensor3& x, double fraction, std::uint64_t seed);

// Assembles the completion problem for an instance: mode 1 categorical,
// modes 2-3 continuous; coarse tensors attached per flag, each either with
// its known map or with only the coarse size declared.
CompletionProblem make_problem(const SyntheticInstance& inst, CooObservations observations,
                               bool use_coarse1, bool use_coarse2, bool p1_known, bool p2_known);

// CP decomposition of a fully observed tensor using the same solver
// (complete observation list, no coarse tensors).
std::pair<FactorSet, SolveReport> oracle_cpd(const DenseTensor3& x, index_t rank,
                                             const SolverConfig& cfg);

// Completion from partial observations only (EM interim tensor, no coupled
// terms). Rejects an empty observation list.
std::pair<FactorSet, SolveReport> cpc_als(const CooObservations& obs, index_t rank,
                                          const SolverConfig& cfg);

// Per-column GP regression over time steps 1..T with squared-exponential
// kernel plus white noise on the diagonal; returns the posterior mean at
// T+1..T+horizon (horizon x R). Throws if the kernel matrix is not SPD.
Matrix gp_forecast(const Matrix& w, index_t horizon, double length_scale, double noise);

// PoF of [[u, v, w_future]] against the true future tensor; the cumulative
// variant sums both tensors along the time mode before comparing.
double evaluate_prediction(const DenseTensor3& true_future, const Matrix& u, const Matrix& v,
                           const Matrix& w_future, bool cumulative = false);

}  // namespace mrtc
