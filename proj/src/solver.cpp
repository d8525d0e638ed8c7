#include "mrtc/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "mrtc/rng.hpp"

namespace mrtc {

std::vector<std::string> check_config(const SolverConfig& cfg) {
  std::vector<std::string> errs;
  if (cfg.rank < 1) errs.push_back("rank must be positive");
  if (cfg.coarse_level_iters < 0) errs.push_back("coarse_level_iters must be nonnegative");
  if (cfg.fine_level_iters < 0) errs.push_back("fine_level_iters must be nonnegative");
  if (cfg.stage1_iters < 0) errs.push_back("stage1_iters must be nonnegative");
  if (cfg.jacobi_rounds < 1) errs.push_back("jacobi_rounds must be positive");
  if (!(cfg.jacobi_weight > 0.0 && cfg.jacobi_weight <= 1.0))
    errs.push_back("jacobi_weight must lie in (0, 1]");
  if (!(cfg.diag_epsilon > 0.0)) errs.push_back("diag_epsilon must be positive");
  if (!(cfg.lambda_decay > 0.0)) errs.push_back("lambda_decay must be positive");
  if (!(cfg.tolerance >= 0.0)) errs.push_back("tolerance must be nonnegative");
  if (cfg.min_mode_size < 2) errs.push_back("min_mode_size must be >= 2");
  return errs;
}

double lambda_at(int iteration, const SolverConfig& cfg) {
  if (iteration < 0) throw std::invalid_argument("lambda_at: iteration must be >= 0");
  return std::exp(-static_cast<double>(iteration) / cfg.lambda_decay);
}

namespace {

int target_mode(FactorTarget t) {
  switch (t) {
    case FactorTarget::U:
    case FactorTarget::Q1: return 1;
    case FactorTarget::V:
    case FactorTarget::Q2: return 2;
    default: return 3;
  }
}

bool is_aux(FactorTarget t) {
  return t == FactorTarget::Q1 || t == FactorTarget::Q2 || t == FactorTarget::Q3;
}

// Factor carried by coarse tensor C^(s) along a given mode of that tensor.
const Matrix& coarse_mode_factor(const FactorSet& fs, int s, int mode) {
  return mode == s ? fs.aux[s - 1] : fs.fine(mode);
}

}  // namespace

NormalEquation assemble_normal_equation(const CompletionProblem& p, const FactorSet& fs,
                                        FactorTarget target, double lambda) {
  if (is_aux(target)) {
    static const CooObservations empty_cache;
    return assemble_normal_equation(p, fs, target, lambda, empty_cache);
  }
  if (!fs.snapshot) throw std::invalid_argument("assemble_normal_equation: missing snapshot");
  const CooObservations masked =
      masked_reconstruction(p.observations, fs.snapshot->u, fs.snapshot->v, fs.snapshot->w);
  return assemble_normal_equation(p, fs, target, lambda, masked);
}

NormalEquation assemble_normal_equation(const CompletionProblem& p, const FactorSet& fs,
                                        FactorTarget target, double lambda,
                                        const CooObservations& masked_snapshot) {
  const int m = target_mode(target);
  const int a = (m == 1) ? 2 : 1;
  const int b = (m == 3) ? 2 : 3;

  NormalEquation ne;
  if (is_aux(target)) {
    if (!p.has_coarse(m))
      throw std::invalid_argument("assemble_normal_equation: no coarse tensor for mode " +
                                  std::to_string(m));
    // The coarse weight appears on both sides and cancels.
    const Matrix& fa = fs.fine(a);
    const Matrix& fb = fs.fine(b);
    ne.gram = hadamard(gram(fa), gram(fb));
    ne.rhs = transpose(mttkrp_dense(p.coarse_tensor(m), fa, fb, m));
    return ne;
  }

  const Matrix& fa = fs.fine(a);
  const Matrix& fb = fs.fine(b);
  ne.gram = hadamard(gram(fa), gram(fb));
  ne.rhs = transpose(interim_mttkrp(p, fs, m, masked_snapshot));
  for (int s = 1; s <= 3; ++s) {
    if (s == m || !p.has_coarse(s) || lambda == 0.0) continue;
    const Matrix& ca = coarse_mode_factor(fs, s, a);
    const Matrix& cb = coarse_mode_factor(fs, s, b);
    add_scaled(ne.gram, lambda, hadamard(gram(ca), gram(cb)));
    add_scaled(ne.rhs, lambda, transpose(mttkrp_dense(p.coarse_tensor(s), ca, cb, m)));
  }
  return ne;
}

Matrix jacobi_solve(const Matrix& gram, const Matrix& rhs, const Matrix& x0,
                    const SolverConfig& cfg) {
  const index_t r = gram.rows();
  if (gram.cols() != r) throw std::invalid_argument("jacobi_solve: gram must be square");
  if (rhs.rows() != r || !x0.same_shape(rhs))
    throw std::invalid_argument("jacobi_solve: rhs/x0 shape mismatch");
  std::vector<double> dinv(static_cast<std::size_t>(r));
  for (index_t i = 0; i < r; ++i) dinv[static_cast<std::size_t>(i)] = 1.0 / (gram(i, i) + cfg.diag_epsilon);

  const double w = cfg.jacobi_weight;
  Matrix x = x0;
  Matrix next(r, rhs.cols());
  for (int sweep = 0; sweep < cfg.jacobi_rounds; ++sweep) {
    Matrix gx = matmul(gram, x);
    for (index_t i = 0; i < r; ++i) {
      const double di = dinv[static_cast<std::size_t>(i)];
      const double gii = gram(i, i);
      for (index_t c = 0; c < rhs.cols(); ++c) {
        const double off = gx(i, c) - gii * x(i, c);  // off-diagonal part only
        next(i, c) = w * di * (rhs(i, c) - off) + (1.0 - w) * x(i, c);
      }
    }
    std::swap(x, next);
  }
  return x;
}

CholeskyError::CholeskyError(index_t pivot_index)
    : std::runtime_error("cholesky_solve: non-positive pivot at row " +
                         std::to_string(pivot_index + 1)),
      pivot(pivot_index) {}

Matrix cholesky_solve(const Matrix& gram, const Matrix& rhs, double epsilon) {
  const index_t r = gram.rows();
  if (gram.cols() != r) throw std::invalid_argument("cholesky_solve: gram must be square");
  if (rhs.rows() != r) throw std::invalid_argument("cholesky_solve: rhs row count mismatch");

  // Pivot floor: a ridged Gram is positive definite in exact arithmetic, but
  // rounding at large magnitudes can push a pivot below zero on severely
  // rank-deficient systems. Such pivots are clamped to the floor; a pivot
  // far below zero relative to the matrix scale means the input was
  // indefinite beyond the ridge and is reported instead.
  double scale = epsilon;
  for (index_t i = 0; i < r; ++i) scale = std::max(scale, std::fabs(gram(i, i)));
  const double pivot_floor = 1e-13 * scale;
  const double indefinite_below = -1e-6 * scale;

  Matrix l(r, r);
  for (index_t i = 0; i < r; ++i)
    for (index_t j = 0; j <= i; ++j) {
      double sum = gram(i, j) + (i == j ? epsilon : 0.0);
      for (index_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
      if (i == j) {
        if (sum < indefinite_below || !(scale > 0.0) || !std::isfinite(sum))
          throw CholeskyError(i);
        l(i, i) = std::sqrt(std::max(sum, pivot_floor));
      } else {
        l(i, j) = sum / l(j, j);
      }
    }

  Matrix x(r, rhs.cols());
  for (index_t c = 0; c < rhs.cols(); ++c) {
    // L y = rhs
    for (index_t i = 0; i < r; ++i) {
      double sum = rhs(i, c);
      for (index_t k = 0; k < i; ++k) sum -= l(i, k) * x(k, c);
      x(i, c) = sum / l(i, i);
    }
    // L^T x = y
    for (index_t i = r - 1; i >= 0; --i) {
      double sum = x(i, c);
      for (index_t k = i + 1; k < r; ++k) sum -= l(k, i) * x(k, c);
      x(i, c) = sum / l(i, i);
    }
  }
  return x;
}

namespace {

// Largest eigenvalue of D^-1 (gram + eps I) via a few power-iteration steps
// (the matrix is similar to an SPD one, so the spectrum is real positive).
double preconditioned_spectral_bound(const Matrix& g, double eps) {
  const index_t r = g.rows();
  std::vector<double> dinv(static_cast<std::size_t>(r));
  for (index_t i = 0; i < r; ++i) dinv[static_cast<std::size_t>(i)] = 1.0 / (g(i, i) + eps);
  std::vector<double> v(static_cast<std::size_t>(r), 1.0);
  double lambda = 1.0;
  for (int step = 0; step < 12; ++step) {
    std::vector<double> next(static_cast<std::size_t>(r), 0.0);
    for (index_t i = 0; i < r; ++i) {
      double acc = eps * v[static_cast<std::size_t>(i)];
      for (index_t j = 0; j < r; ++j) acc += g(i, j) * v[static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(i)] = dinv[static_cast<std::size_t>(i)] * acc;
    }
    double norm = 0.0;
    for (double x : next) norm = std::max(norm, std::fabs(x));
    if (!(norm > 0.0) || !std::isfinite(norm)) return 1.0;
    lambda = norm;
    for (double& x : next) x /= norm;
    v = std::move(next);
  }
  return lambda;
}

double system_residual(const Matrix& g, const Matrix& rhs, const Matrix& x, double eps) {
  Matrix r = matmul(g, x);
  add_scaled(r, eps, x);
  add_scaled(r, -1.0, rhs);
  double acc = 0.0;
  for (double v : r.data()) acc += v * v;
  return acc;
}

// One stage-1 update. The configured weight is capped so the sweep operator
// stays non-expanding even on far-from-dominant Grams (the smoother has no
// convergence guarantee of its own), and an iterate that still worsened its
// linear system is discarded.
Matrix guarded_jacobi(const NormalEquation& ne, const Matrix& x0, const SolverConfig& cfg) {
  SolverConfig sweep_cfg = cfg;
  const double bound = preconditioned_spectral_bound(ne.gram, cfg.diag_epsilon);
  if (bound > 0.0) sweep_cfg.jacobi_weight = std::min(cfg.jacobi_weight, 1.8 / bound);
  const Matrix x = jacobi_solve(ne.gram, ne.rhs, x0, sweep_cfg);
  if (system_residual(ne.gram, ne.rhs, x, cfg.diag_epsilon) <=
      system_residual(ne.gram, ne.rhs, x0, cfg.diag_epsilon))
    return x;
  return x0;
}

}  // namespace

FactorSet als_iteration(const CompletionProblem& p, FactorSet fs, int iteration,
                        const SolverConfig& cfg, std::optional<double> lambda_override) {
  if (!fs.snapshot) throw std::invalid_argument("als_iteration: missing snapshot");
  const double lambda = lambda_override ? *lambda_override : lambda_at(iteration, cfg);
  const bool use_jacobi = iteration < cfg.stage1_iters;
  const CooObservations masked =
      masked_reconstruction(p.observations, fs.snapshot->u, fs.snapshot->v, fs.snapshot->w);

  std::vector<FactorTarget> order{FactorTarget::W};
  const FactorTarget aux_targets[3] = {FactorTarget::Q1, FactorTarget::Q2, FactorTarget::Q3};
  for (int s = 1; s <= 3; ++s)
    if (p.mode(s).aggregation == AggregationState::unknown) order.push_back(aux_targets[s - 1]);
  order.push_back(FactorTarget::U);
  order.push_back(FactorTarget::V);

  for (FactorTarget target : order) {
    const NormalEquation ne = assemble_normal_equation(p, fs, target, lambda, masked);
    Matrix& factor = is_aux(target) ? fs.aux[target_mode(target) - 1] : fs.fine(target_mode(target));
    // The ridge grows with the Gram once its magnitude leaves the data
    // scale: an absolute epsilon vanishes relative to the system when factor
    // norms inflate, letting degenerate trajectories run away unbounded.
    // Well-scaled systems keep the configured epsilon exactly.
    double gram_scale = 1.0;
    for (index_t d = 0; d < ne.gram.rows(); ++d) gram_scale = std::max(gram_scale, ne.gram(d, d));
    const double ridge = cfg.diag_epsilon * std::max(1.0, gram_scale * 1e-5);
    const Matrix solution = use_jacobi
                                ? guarded_jacobi(ne, transpose(factor), cfg)
                                : cholesky_solve(ne.gram, ne.rhs, ridge);
    factor = transpose(solution);
  }
  for (int s = 1; s <= 3; ++s)
    if (p.mode(s).aggregation == AggregationState::known)
      fs.aux[s - 1] = apply_aggregation(*p.mode(s).map, fs.fine(s));

  // Components abandoned by the ridged solves decay geometrically toward
  // underflow, and exact zero columns violate the rescaling contract.
  // Re-seed dying components at a tiny relative magnitude; they stay
  // available without disturbing the fit.
  {
    const index_t r = fs.rank();
    double max_product = 0.0;
    std::vector<double> product(static_cast<std::size_t>(r));
    double max_norm[3] = {0.0, 0.0, 0.0};
    for (index_t c = 0; c < r; ++c) {
      const double nu = column_norm(fs.u, c);
      const double nv = column_norm(fs.v, c);
      const double nw = column_norm(fs.w, c);
      product[static_cast<std::size_t>(c)] = nu * nv * nw;
      max_product = std::max(max_product, product[static_cast<std::size_t>(c)]);
      max_norm[0] = std::max(max_norm[0], nu);
      max_norm[1] = std::max(max_norm[1], nv);
      max_norm[2] = std::max(max_norm[2], nw);
    }
    for (index_t c = 0; c < r; ++c) {
      if (product[static_cast<std::size_t>(c)] >= 1e-30 * max_product &&
          product[static_cast<std::size_t>(c)] > 0.0)
        continue;
      Rng reseed(derive_seed(cfg.seed, 7777, static_cast<std::uint64_t>(iteration) *
                                                 static_cast<std::uint64_t>(r) +
                                             static_cast<std::uint64_t>(c)));
      for (int m = 0; m < 3; ++m) {
        Matrix& f = m == 0 ? fs.u : (m == 1 ? fs.v : fs.w);
        const double scale = 1e-4 * max_norm[m];
        if (!(scale > 0.0)) continue;
        for (index_t i = 0; i < f.rows(); ++i) f(i, c) = scale * reseed.unit();
      }
    }
    for (int s = 1; s <= 3; ++s)
      if (p.mode(s).aggregation == AggregationState::known)
        fs.aux[s - 1] = apply_aggregation(*p.mode(s).map, fs.fine(s));
  }

  fs = rescale_columns(std::move(fs));
  // Recompute constrained auxiliaries so the constraint holds bitwise.
  for (int s = 1; s <= 3; ++s)
    if (p.mode(s).aggregation == AggregationState::known)
      fs.aux[s - 1] = apply_aggregation(*p.mode(s).map, fs.fine(s));
  fs.snapshot = FactorSet::Snapshot{fs.u, fs.v, fs.w};
  return fs;
}

FactorSet solve_level(const CompletionProblem& p, FactorSet init, int iters,
                      const SolverConfig& cfg, SolveReport& report, const LevelOptions& opt) {
  FactorSet fs = std::move(init);
  if (!fs.snapshot) fs.snapshot = FactorSet::Snapshot{fs.u, fs.v, fs.w};
  double prev_total = 0.0;
  bool have_prev = false;
  for (int k = 0; k < iters; ++k) {
    const double lambda = opt.schedule_lambda ? lambda_at(k, cfg) : 1.0;
    const auto t0 = std::chrono::steady_clock::now();
    fs = als_iteration(p, fs, k, cfg, lambda);
    const auto t1 = std::chrono::steady_clock::now();

    SolveRecord rec;
    rec.level = opt.level_id;
    rec.iteration = k;
    rec.lambda = lambda;
    rec.observed_loss = observed_loss(p, fs);
    rec.coarse_loss = coarse_loss(p, fs, lambda);
    rec.seconds = std::chrono::duration<double>(t1 - t0).count();
    if (opt.ground_truth) rec.pof = pof(*opt.ground_truth, reconstruct(fs.u, fs.v, fs.w));
    report.records.push_back(rec);

    const double total = rec.observed_loss + rec.coarse_loss;
    if (have_prev) {
      const double denom = std::max(prev_total, 1e-300);
      if (std::fabs(prev_total - total) < cfg.tolerance * denom) break;
    }
    prev_total = total;
    have_prev = true;
  }
  return fs;
}

FactorSet random_factors(const CompletionProblem& p, index_t rank, std::uint64_t seed) {
  Rng rng(seed);
  FactorSet fs;
  // Nonnegative draws: a mixed-sign start on count-like data seeds pairs of
  // near-cancelling components that the alternating solves are slow to untangle.
  auto draw = [&rng, rank](index_t rows) {
    Matrix m(rows, rank);
    for (index_t i = 0; i < rows; ++i)
      for (index_t c = 0; c < rank; ++c) m(i, c) = rng.unit();
    return m;
  };
  fs.u = draw(p.shape.i1);
  fs.v = draw(p.shape.i2);
  fs.w = draw(p.shape.i3);
  for (int s = 1; s <= 3; ++s) {
    const ModeSpec& spec = p.mode(s);
    if (spec.aggregation == AggregationState::unknown)
      fs.aux[s - 1] = draw(spec.coarse_size);
    else if (spec.aggregation == AggregationState::known)
      fs.aux[s - 1] = apply_aggregation(*spec.map, fs.fine(s));
  }
  fs.snapshot = FactorSet::Snapshot{fs.u, fs.v, fs.w};
  return fs;
}

std::pair<FactorSet, SolveReport> mtc_solve(const CompletionProblem& p, const SolverConfig& cfg,
                                            const DenseTensor3* ground_truth) {
  {
    std::vector<std::string> errs = validate(p);
    if (!errs.empty()) {
      std::string joined = "mtc_solve: invalid problem:";
      for (const std::string& e : errs) joined += " [" + e + "]";
      throw std::invalid_argument(joined);
    }
    errs = check_config(cfg);
    if (!errs.empty()) {
      std::string joined = "mtc_solve: invalid config:";
      for (const std::string& e : errs) joined += " [" + e + "]";
      throw std::invalid_argument(joined);
    }
  }

  const ResolutionHierarchy hierarchy = build_hierarchy(p, cfg.min_mode_size);
  const int n_levels = static_cast<int>(hierarchy.levels.size());

  SolveReport report;
  FactorSet fs = random_factors(hierarchy.levels.front(), cfg.rank, derive_seed(cfg.seed, 0));
  for (int li = 0; li < n_levels; ++li) {
    const bool finest = li == n_levels - 1;
    LevelOptions opt;
    opt.level_id = li;
    opt.schedule_lambda = finest;
    opt.ground_truth = finest ? ground_truth : nullptr;
    const int iters = finest ? cfg.fine_level_iters : cfg.coarse_level_iters;
    fs = solve_level(hierarchy.levels[li], std::move(fs), iters, cfg, report, opt);
    if (!finest)
      fs = interpolate_solution(hierarchy.levels[li + 1], hierarchy.transitions[li], fs,
                                derive_seed(cfg.seed, 100 + static_cast<std::uint64_t>(li)));
  }
  return {std::move(fs), std::move(report)};
}

}  // namespace mrtc
