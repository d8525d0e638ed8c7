#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mrtc/coo.hpp"
#include "mrtc/kruskal.hpp"

namespace mrtc {

// Binary coarse-from-fine map with one-hot columns, stored as the
// fine-index -> coarse-index assignment (0-based). Every coarse index must
// own at least one fine index and coarse_size < fine_size.
struct AggregationMatrix {
  index_t coarse_size = 0;
  index_t fine_size = 0;
  std::vector<index_t> assignment;
};

// Violations of the AggregationMatrix invariants; empty when well-formed.
std::vector<std::string> check_aggregation(const AggregationMatrix& p);

// P * fine: sums the fine rows of each coarse bucket. Result is J x R.
Matrix apply_aggregation(const AggregationMatrix& p, const Matrix& fine);

// Dense {0,1} matrix form (J x I).
Matrix aggregation_to_matrix(const AggregationMatrix& p);

enum class ModeKind { continuous, categorical };
enum class AggregationState { none, known, unknown };

struct ModeSpec {
  ModeKind kind = ModeKind::continuous;
  index_t fine_size = 0;
  AggregationState aggregation = AggregationState::none;
  index_t coarse_size = 0;                // J, set when aggregation != none
  std::optional<AggregationMatrix> map;   // set iff aggregation == known

  bool aggregated() const { return aggregation != AggregationState::none; }
};

// A completion instance: partial observations of the fine tensor plus at
// most one coarse (mode-aggregated) tensor per mode. coarse[m-1] holds the
// tensor aggregated along mode m; its shape replaces I_m with J_m. lambda[s]
// weighs the coarse term of mode s+1 in the standalone loss (the solver
// substitutes its own schedule value).
struct CompletionProblem {
  Shape3 shape;
  CooObservations observations;
  std::array<std::optional<DenseTensor3>, 3> coarse;
  std::array<ModeSpec, 3> modes;
  std::array<double, 3> lambda = {1.0, 1.0, 1.0};

  const ModeSpec& mode(int m) const { return modes[m - 1]; }
  ModeSpec& mode(int m) { return modes[m - 1]; }
  bool has_coarse(int m) const { return coarse[m - 1].has_value(); }
  const DenseTensor3& coarse_tensor(int m) const { return *coarse[m - 1]; }
};

// Checks every structural invariant; returns all violations (empty = ok).
std::vector<std::string> validate(const CompletionProblem& p);

// Sum of squared residuals over the observed coordinates only; the dense
// tensor is never formed.
double observed_loss(const CompletionProblem& p, const FactorSet& fs);

// Weighted coarse residuals: sum_s lambda[s] ||C^(s) - [[...]]||_F^2 with the
// mode-s factor replaced by the auxiliary factor. The overload with
// lambda_all applies one weight to every coarse term (the solver schedule).
double coarse_loss(const CompletionProblem& p, const FactorSet& fs);
double coarse_loss(const CompletionProblem& p, const FactorSet& fs, double lambda_all);

// MTTKRP against the interim tensor (observed data with unobserved entries
// filled by the snapshot reconstruction) without materializing it:
//   mttkrp(M*X) + snapshot-mode-factor * (F_a^T Fa_k * F_b^T Fb_k)^T
//   - mttkrp(M*[[snapshot]])
// Requires fs.snapshot. Result is I_mode x R.
Matrix interim_mttkrp(const CompletionProblem& p, const FactorSet& fs, int mode);

// Same, reusing a precomputed masked snapshot reconstruction (it is constant
// within an outer iteration).
Matrix interim_mttkrp(const CompletionProblem& p, const FactorSet& fs, int mode,
                      const CooObservations& masked_snapshot);

}  // namespace mrtc
