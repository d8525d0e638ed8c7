#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mrtc/multires.hpp"
#include "mrtc/problem.hpp"

namespace mrtc {

struct SolverConfig {
  index_t rank = 10;
  int coarse_level_iters = 20;
  int fine_level_iters = 200;
  int stage1_iters = 5;        // N: Jacobi iterations before switching to Cholesky
  int jacobi_rounds = 5;       // sweeps per stage-1 iteration
  double jacobi_weight = 0.7;  // w in (0, 1]
  double diag_epsilon = 1e-5;  // ridge added to every diagonal before solving
  double lambda_decay = 20.0;  // tau in lambda_i = exp(-i/tau)
  double tolerance = 1e-6;     // relative loss change for early stopping
  index_t min_mode_size = 16;  // hierarchy stops before a mode falls below this
  std::uint64_t seed = 7;
};

// Violations of the SolverConfig invariants; empty when well-formed.
std::vector<std::string> check_config(const SolverConfig& cfg);

struct SolveRecord {
  int level = 0;
  int iteration = 0;
  double lambda = 0.0;
  double observed_loss = 0.0;
  double coarse_loss = 0.0;
  std::optional<double> pof;  // vs ground truth, finest level only
  double seconds = 0.0;
};

struct SolveReport {
  std::vector<SolveRecord> records;
};

// Coarse-information weight at the i-th fine-level iteration: exp(-i/tau).
double lambda_at(int iteration, const SolverConfig& cfg);

enum class FactorTarget { U, V, W, Q1, Q2, Q3 };

// One joint normal equation gram * X = rhs with X the transposed factor
// (R x I_target). Fine targets stack the interim-tensor system with every
// coarse tensor that carries the mode at fine granularity, weighted by
// lambda; auxiliary targets use their own coarse tensor alone (the weight
// cancels).
struct NormalEquation {
  Matrix gram;  // R x R
  Matrix rhs;   // R x I_target
};

NormalEquation assemble_normal_equation(const CompletionProblem& p, const FactorSet& fs,
                                        FactorTarget target, double lambda);
NormalEquation assemble_normal_equation(const CompletionProblem& p, const FactorSet& fs,
                                        FactorTarget target, double lambda,
                                        const CooObservations& masked_snapshot);

// Weighted Jacobi sweeps on (gram + eps I) X = rhs starting from x0:
//   X <- w D^-1 (rhs - R_off X) + (1 - w) X,  D = diag(gram) + eps I.
// Runs cfg.jacobi_rounds sweeps; no convergence guarantee.
Matrix jacobi_solve(const Matrix& gram, const Matrix& rhs, const Matrix& x0,
                    const SolverConfig& cfg);

// Exact solve of (gram + eps I) X = rhs via one Cholesky factorization and
// two triangular solves per column.
Matrix cholesky_solve(const Matrix& gram, const Matrix& rhs, double epsilon);

struct CholeskyError : std::runtime_error {
  explicit CholeskyError(index_t pivot_index);
  index_t pivot;  // 0-based row where the factorization failed
};

// One outer iteration: sequential updates of W, unknown-aggregation
// auxiliary factors, U, V (Jacobi for iterations < N, Cholesky after), then
// known-aggregation auxiliary factors from their constraint, column
// rescaling, and a snapshot refresh. lambda_override replaces the scheduled
// weight (coarse levels run at lambda = 1).
FactorSet als_iteration(const CompletionProblem& p, FactorSet fs, int iteration,
                        const SolverConfig& cfg,
                        std::optional<double> lambda_override = std::nullopt);

struct LevelOptions {
  int level_id = 0;
  bool schedule_lambda = true;  // false: fixed lambda = 1 (coarse levels)
  const DenseTensor3* ground_truth = nullptr;
};

// Runs up to `iters` iterations of als_iteration, stopping early when the
// relative change of (observed + coarse) loss drops below cfg.tolerance.
// Appends one record per iteration to the report.
FactorSet solve_level(const CompletionProblem& p, FactorSet init, int iters,
                      const SolverConfig& cfg, SolveReport& report,
                      const LevelOptions& opt = {});

// I.i.d. uniform [0,1) factors sized for p (known-aggregation auxiliaries
// are computed from their constraint); snapshot set to the drawn factors.
FactorSet random_factors(const CompletionProblem& p, index_t rank, std::uint64_t seed);

// Full multiresolution solve: builds the hierarchy, random-initializes the
// coarsest level, alternates solve_level and interpolate_solution upward,
// and runs the fine-level iteration budget with the lambda schedule at the
// finest level. Levels are numbered coarsest = 0 in the report.
std::pair<FactorSet, SolveReport> mtc_solve(const CompletionProblem& p, const SolverConfig& cfg,
                                            const DenseTensor3* ground_truth = nullptr);

}  // namespace mrtc
