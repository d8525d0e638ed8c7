#include "mrtc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mrtc/rng.hpp"

namespace mrtc {

namespace {

Matrix uniform_matrix(Rng& rng, index_t rows, index_t cols) {
  Matrix m(rows, cols);
  for (index_t i = 0; i < rows; ++i)
    for (index_t c = 0; c < cols; ++c) m(i, c) = rng.unit();
  return m;
}

void sort_columns(Matrix& m) {
  std::vector<double> col(static_cast<std::size_t>(m.rows()));
  for (index_t c = 0; c < m.cols(); ++c) {
    for (index_t i = 0; i < m.rows(); ++i) col[static_cast<std::size_t>(i)] = m(i, c);
    std::sort(col.begin(), col.end());
    for (index_t i = 0; i < m.rows(); ++i) m(i, c) = col[static_cast<std::size_t>(i)];
  }
}

// Contiguous blocks of ceil(I/J) fine indices, the last block absorbing the
// remainder. Rejects ratios that would leave the last block empty.
AggregationMatrix block_aggregation(index_t fine, index_t coarse) {
  if (coarse >= fine || coarse < 1)
    throw std::invalid_argument("block_aggregation: need 0 < J < I");
  const index_t block = (fine + coarse - 1) / coarse;
  if ((coarse - 1) * block >= fine)
    throw std::invalid_argument("block_aggregation: block size ceil(I/J) leaves an empty block");
  AggregationMatrix p;
  p.fine_size = fine;
  p.coarse_size = coarse;
  p.assignment.resize(static_cast<std::size_t>(fine));
  for (index_t i = 0; i < fine; ++i)
    p.assignment[static_cast<std::size_t>(i)] = std::min(i / block, coarse - 1);
  return p;
}

}  // namespace

SyntheticInstance generate_synthetic(index_t rank, index_t mode_size, index_t coarse_size,
                                     std::uint64_t seed) {
  if (rank < 1) throw std::invalid_argument("generate_synthetic: rank must be positive");
  if (coarse_size >= mode_size)
    throw std::invalid_argument("generate_synthetic: coarse_size must be < mode_size");

  SyntheticInstance inst;
  inst.seed = seed;
  Rng rng(derive_seed(seed, 42));
  inst.u = uniform_matrix(rng, mode_size, rank);
  inst.v = uniform_matrix(rng, mode_size, rank);
  inst.w = uniform_matrix(rng, mode_size, rank);
  sort_columns(inst.v);
  sort_columns(inst.w);
  inst.x = reconstruct(inst.u, inst.v, inst.w);
  inst.p1 = block_aggregation(mode_size, coarse_size);
  inst.p2 = inst.p1;
  inst.coarse1 = mode_product(inst.x, aggregation_to_matrix(inst.p1), 1);
  inst.coarse2 = mode_product(inst.x, aggregation_to_matrix(inst.p2), 2);
  return inst;
}

CooObservations sample_mask(const DenseTensor3& x, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw std::invalid_argument("sample_mask: fraction must lie in (0, 1]");
  const Shape3 s = x.shape();
  const index_t total = s.size();
  const index_t count = static_cast<index_t>(fraction * static_cast<double>(total));

  std::vector<std::uint64_t> perm(static_cast<std::size_t>(total));
  std::iota(perm.begin(), perm.end(), 0u);
  Rng rng(derive_seed(seed, 7));
  for (index_t t = 0; t < count; ++t) {
    const std::uint64_t pick =
        static_cast<std::uint64_t>(t) + rng.below(static_cast<std::uint64_t>(total - t));
    std::swap(perm[static_cast<std::size_t>(t)], perm[static_cast<std::size_t>(pick)]);
  }
  perm.resize(static_cast<std::size_t>(count));
  std::sort(perm.begin(), perm.end());

  std::vector<CooEntry> entries;
  entries.reserve(perm.size());
  for (std::uint64_t linear : perm) {
    const index_t i = static_cast<index_t>(linear) / (s.i2 * s.i3);
    const index_t j = (static_cast<index_t>(linear) / s.i3) % s.i2;
    const index_t k = static_cast<index_t>(linear) % s.i3;
    entries.push_back({i, j, k, x(i, j, k)});
  }
  return CooObservations(s, std::move(entries));
}

CompletionProblem make_problem(const SyntheticInstance& inst, CooObservations observations,
                               bool use_coarse1, bool use_coarse2, bool p1_known, bool p2_known) {
  CompletionProblem p;
  p.shape = inst.x.shape();
  p.observations = std::move(observations);
  p.mode(1).kind = ModeKind::categorical;
  p.mode(2).kind = ModeKind::continuous;
  p.mode(3).kind = ModeKind::continuous;
  for (int m = 1; m <= 3; ++m) p.mode(m).fine_size = p.shape.dim(m);
  if (use_coarse1) {
    p.coarse[0] = inst.coarse1;
    p.mode(1).aggregation = p1_known ? AggregationState::known : AggregationState::unknown;
    p.mode(1).coarse_size = inst.p1.coarse_size;
    if (p1_known) p.mode(1).map = inst.p1;
  }
  if (use_coarse2) {
    p.coarse[1] = inst.coarse2;
    p.mode(2).aggregation = p2_known ? AggregationState::known : AggregationState::unknown;
    p.mode(2).coarse_size = inst.p2.coarse_size;
    if (p2_known) p.mode(2).map = inst.p2;
  }
  return p;
}

namespace {

CompletionProblem plain_problem(CooObservations obs) {
  CompletionProblem p;
  p.shape = obs.shape();
  p.observations = std::move(obs);
  for (int m = 1; m <= 3; ++m) {
    p.mode(m).kind = ModeKind::continuous;
    p.mode(m).fine_size = p.shape.dim(m);
  }
  return p;
}

}  // namespace

std::pair<FactorSet, SolveReport> oracle_cpd(const DenseTensor3& x, index_t rank,
                                             const SolverConfig& cfg) {
  const Shape3 s = x.shape();
  std::vector<CooEntry> entries;
  entries.reserve(static_cast<std::size_t>(s.size()));
  for (index_t i = 0; i < s.i1; ++i)
    for (index_t j = 0; j < s.i2; ++j)
      for (index_t k = 0; k < s.i3; ++k) entries.push_back({i, j, k, x(i, j, k)});
  const CompletionProblem p = plain_problem(CooObservations(s, std::move(entries)));

  SolveReport report;
  FactorSet init = random_factors(p, rank, derive_seed(cfg.seed, 0));
  LevelOptions opt;
  opt.ground_truth = &x;
  FactorSet fs = solve_level(p, std::move(init), cfg.fine_level_iters, cfg, report, opt);
  return {std::move(fs), std::move(report)};
}

std::pair<FactorSet, SolveReport> cpc_als(const CooObservations& obs, index_t rank,
                                          const SolverConfig& cfg) {
  if (obs.empty()) throw std::invalid_argument("cpc_als: observation list is empty");
  const CompletionProblem p = plain_problem(obs);
  SolveReport report;
  FactorSet init = random_factors(p, rank, derive_seed(cfg.seed, 0));
  FactorSet fs = solve_level(p, std::move(init), cfg.fine_level_iters, cfg, report, {});
  return {std::move(fs), std::move(report)};
}

Matrix gp_forecast(const Matrix& w, index_t horizon, double length_scale, double noise) {
  if (w.rows() < 2) throw std::invalid_argument("gp_forecast: need at least two time steps");
  if (horizon < 1) throw std::invalid_argument("gp_forecast: horizon must be >= 1");
  if (!(length_scale > 0.0)) throw std::invalid_argument("gp_forecast: length_scale must be > 0");
  const index_t t = w.rows();
  const double inv2l2 = 1.0 / (2.0 * length_scale * length_scale);

  // Columns are centered on their training mean; far from the data the
  // posterior reverts to that mean rather than to zero, so a constant
  // column forecasts as itself.
  std::vector<double> mean(static_cast<std::size_t>(w.cols()), 0.0);
  for (index_t c = 0; c < w.cols(); ++c) {
    for (index_t a = 0; a < t; ++a) mean[static_cast<std::size_t>(c)] += w(a, c);
    mean[static_cast<std::size_t>(c)] /= static_cast<double>(t);
  }
  Matrix centered(t, w.cols());
  for (index_t a = 0; a < t; ++a)
    for (index_t c = 0; c < w.cols(); ++c)
      centered(a, c) = w(a, c) - mean[static_cast<std::size_t>(c)];

  Matrix kernel(t, t);
  for (index_t a = 0; a < t; ++a)
    for (index_t b = 0; b < t; ++b) {
      const double d = static_cast<double>(a - b);
      kernel(a, b) = std::exp(-d * d * inv2l2) + (a == b ? noise : 0.0);
    }

  // alpha = K^-1 (W - mean), one factorization shared across columns. A
  // failed pivot means the white-noise term is too small for this length
  // scale.
  Matrix alpha;
  try {
    alpha = cholesky_solve(kernel, centered, 0.0);
  } catch (const CholeskyError&) {
    throw std::invalid_argument("gp_forecast: kernel matrix is not positive definite (noise too small)");
  }

  Matrix cross(horizon, t);
  for (index_t h = 0; h < horizon; ++h)
    for (index_t b = 0; b < t; ++b) {
      const double d = static_cast<double>(t + h - b);
      cross(h, b) = std::exp(-d * d * inv2l2);
    }
  Matrix out = matmul(cross, alpha);
  for (index_t h = 0; h < horizon; ++h)
    for (index_t c = 0; c < w.cols(); ++c) out(h, c) += mean[static_cast<std::size_t>(c)];
  return out;
}

double evaluate_prediction(const DenseTensor3& true_future, const Matrix& u, const Matrix& v,
                           const Matrix& w_future, bool cumulative) {
  const DenseTensor3 recon = reconstruct(u, v, w_future);
  if (!cumulative) return pof(true_future, recon);

  auto sum_time = [](const DenseTensor3& t) {
    const Shape3 s = t.shape();
    DenseTensor3 out({s.i1, s.i2, 1});
    for (index_t i = 0; i < s.i1; ++i)
      for (index_t j = 0; j < s.i2; ++j) {
        double acc = 0.0;
        for (index_t k = 0; k < s.i3; ++k) acc += t(i, j, k);
        out(i, j, 0) = acc;
      }
    return out;
  };
  return pof(sum_time(true_future), sum_time(recon));
}

}  // namespace mrtc
