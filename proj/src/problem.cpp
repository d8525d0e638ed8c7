#include "mrtc/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace mrtc {

std::vector<std::string> check_aggregation(const AggregationMatrix& p) {
  std::vector<std::string> errs;
  if (p.coarse_size <= 0 || p.fine_size <= 0) {
    errs.push_back("aggregation: sizes must be positive");
    return errs;
  }
  if (p.coarse_size >= p.fine_size)
    errs.push_back("aggregation: coarse size " + std::to_string(p.coarse_size) +
                   " must be smaller than fine size " + std::to_string(p.fine_size));
  if (static_cast<index_t>(p.assignment.size()) != p.fine_size) {
    errs.push_back("aggregation: assignment length does not match fine size");
    return errs;
  }
  std::vector<index_t> bucket_counts(static_cast<std::size_t>(p.coarse_size), 0);
  for (index_t i = 0; i < p.fine_size; ++i) {
    const index_t c = p.assignment[static_cast<std::size_t>(i)];
    if (c < 0 || c >= p.coarse_size) {
      errs.push_back("aggregation: fine index " + std::to_string(i + 1) +
                     " maps outside the coarse range");
      return errs;
    }
    ++bucket_counts[static_cast<std::size_t>(c)];
  }
  for (index_t c = 0; c < p.coarse_size; ++c)
    if (bucket_counts[static_cast<std::size_t>(c)] == 0)
      errs.push_back("aggregation: coarse index " + std::to_string(c + 1) +
                     " has no fine indices");
  return errs;
}

Matrix apply_aggregation(const AggregationMatrix& p, const Matrix& fine) {
  if (fine.rows() != p.fine_size)
    throw std::invalid_argument("apply_aggregation: row count does not match fine size");
  Matrix out(p.coarse_size, fine.cols());
  for (index_t i = 0; i < p.fine_size; ++i) {
    double* dst = out.row(p.assignment[static_cast<std::size_t>(i)]);
    const double* src = fine.row(i);
    for (index_t c = 0; c < fine.cols(); ++c) dst[c] += src[c];
  }
  return out;
}

Matrix aggregation_to_matrix(const AggregationMatrix& p) {
  Matrix out(p.coarse_size, p.fine_size);
  for (index_t i = 0; i < p.fine_size; ++i)
    out(p.assignment[static_cast<std::size_t>(i)], i) = 1.0;
  return out;
}

namespace {

// Factors of the coarse tensor of mode s, aligned with its three modes: the
// aggregated mode uses the auxiliary factor, the others the fine factors.
const Matrix& coarse_factor(const FactorSet& fs, int s, int mode_of_tensor) {
  if (mode_of_tensor == s) return fs.aux[s - 1];
  return fs.fine(mode_of_tensor);
}

// ||c - [[a,b,d]]||_F^2 with factors aligned to c's modes.
double kruskal_residual_sq(const DenseTensor3& c, const Matrix& a, const Matrix& b,
                           const Matrix& d) {
  const Shape3 s = c.shape();
  if (a.rows() != s.i1 || b.rows() != s.i2 || d.rows() != s.i3 ||
      a.cols() != b.cols() || b.cols() != d.cols())
    throw std::invalid_argument("coarse_loss: factor shapes do not match coarse tensor");
  const index_t r = a.cols();
  std::vector<double> ab(static_cast<std::size_t>(r));
  double acc = 0.0;
  for (index_t i = 0; i < s.i1; ++i) {
    const double* ra = a.row(i);
    for (index_t j = 0; j < s.i2; ++j) {
      const double* rb = b.row(j);
      for (index_t q = 0; q < r; ++q) ab[q] = ra[q] * rb[q];
      for (index_t k = 0; k < s.i3; ++k) {
        const double* rd = d.row(k);
        double val = 0.0;
        for (index_t q = 0; q < r; ++q) val += ab[q] * rd[q];
        const double diff = c(i, j, k) - val;
        acc += diff * diff;
      }
    }
  }
  return acc;
}

double coarse_loss_impl(const CompletionProblem& p, const FactorSet& fs,
                        const std::array<double, 3>& lambda) {
  double acc = 0.0;
  for (int s = 1; s <= 3; ++s) {
    if (!p.has_coarse(s) || lambda[s - 1] == 0.0) continue;
    const DenseTensor3& c = p.coarse_tensor(s);
    acc += lambda[s - 1] * kruskal_residual_sq(c, coarse_factor(fs, s, 1),
                                               coarse_factor(fs, s, 2),
                                               coarse_factor(fs, s, 3));
  }
  return acc;
}

}  // namespace

std::vector<std::string> validate(const CompletionProblem& p) {
  std::vector<std::string> errs;
  if (p.shape.i1 <= 0 || p.shape.i2 <= 0 || p.shape.i3 <= 0)
    errs.push_back("shape must be positive in every mode");
  if (!(p.observations.shape() == p.shape))
    errs.push_back("observation shape does not match problem shape");

  for (int m = 1; m <= 3; ++m) {
    const ModeSpec& spec = p.mode(m);
    const std::string tag = "mode " + std::to_string(m);
    if (spec.fine_size != p.shape.dim(m))
      errs.push_back(tag + ": spec fine size " + std::to_string(spec.fine_size) +
                     " does not match shape " + std::to_string(p.shape.dim(m)));
    if (spec.aggregated()) {
      if (spec.coarse_size <= 0 || spec.coarse_size >= spec.fine_size)
        errs.push_back(tag + ": coarse size " + std::to_string(spec.coarse_size) +
                       " must satisfy 0 < J < " + std::to_string(spec.fine_size));
      if (spec.aggregation == AggregationState::known) {
        if (!spec.map) {
          errs.push_back(tag + ": known aggregation without a map");
        } else {
          for (const std::string& e : check_aggregation(*spec.map)) errs.push_back(tag + ": " + e);
          if (spec.map->fine_size != spec.fine_size || spec.map->coarse_size != spec.coarse_size)
            errs.push_back(tag + ": aggregation map sizes do not match the mode spec");
        }
      } else if (spec.map) {
        errs.push_back(tag + ": unknown aggregation must not carry a map");
      }
      if (!p.has_coarse(m)) errs.push_back(tag + ": aggregated but no coarse tensor attached");
    } else {
      if (p.has_coarse(m)) errs.push_back(tag + ": coarse tensor attached but mode not aggregated");
      if (spec.map) errs.push_back(tag + ": aggregation map present but mode not aggregated");
    }
    if (p.lambda[m - 1] < 0.0) errs.push_back(tag + ": lambda must be nonnegative");
  }

  for (int s = 1; s <= 3; ++s) {
    if (!p.has_coarse(s)) continue;
    const ModeSpec& spec = p.mode(s);
    Shape3 expected = p.shape;
    if (spec.aggregated()) expected = expected.with_dim(s, spec.coarse_size);
    const DenseTensor3& c = p.coarse_tensor(s);
    if (!(c.shape() == expected))
      errs.push_back("mode " + std::to_string(s) + ": coarse tensor shape (" +
                     std::to_string(c.shape().i1) + "," + std::to_string(c.shape().i2) + "," +
                     std::to_string(c.shape().i3) + ") does not match expected (" +
                     std::to_string(expected.i1) + "," + std::to_string(expected.i2) + "," +
                     std::to_string(expected.i3) + ")");
    for (double v : c.data())
      if (!std::isfinite(v)) {
        errs.push_back("mode " + std::to_string(s) + ": coarse tensor has non-finite entries");
        break;
      }
  }

  // The CooObservations constructor already enforces range, uniqueness and
  // finiteness; re-check here so externally mutated problems still surface.
  const auto& entries = p.observations.entries();
  for (std::size_t n = 0; n < entries.size(); ++n) {
    const CooEntry& e = entries[n];
    if (e.i < 0 || e.i >= p.shape.i1 || e.j < 0 || e.j >= p.shape.i2 || e.k < 0 ||
        e.k >= p.shape.i3) {
      errs.push_back("observation (" + std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) +
                     "," + std::to_string(e.k + 1) + ") out of range");
      break;
    }
    if (!std::isfinite(e.value)) {
      errs.push_back("observation (" + std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) +
                     "," + std::to_string(e.k + 1) + ") has a non-finite value");
      break;
    }
    if (n > 0) {
      const CooEntry& prev = entries[n - 1];
      if (prev.i == e.i && prev.j == e.j && prev.k == e.k) {
        errs.push_back("duplicate observation (" + std::to_string(e.i + 1) + "," +
                       std::to_string(e.j + 1) + "," + std::to_string(e.k + 1) + ")");
        break;
      }
    }
  }
  return errs;
}

double observed_loss(const CompletionProblem& p, const FactorSet& fs) {
  const CooObservations recon = masked_reconstruction(p.observations, fs.u, fs.v, fs.w);
  double acc = 0.0;
  for (std::size_t n = 0; n < p.observations.entries().size(); ++n) {
    const double d = p.observations.entries()[n].value - recon.entries()[n].value;
    acc += d * d;
  }
  return acc;
}

double coarse_loss(const CompletionProblem& p, const FactorSet& fs) {
  return coarse_loss_impl(p, fs, p.lambda);
}

double coarse_loss(const CompletionProblem& p, const FactorSet& fs, double lambda_all) {
  return coarse_loss_impl(p, fs, {lambda_all, lambda_all, lambda_all});
}

Matrix interim_mttkrp(const CompletionProblem& p, const FactorSet& fs, int mode) {
  if (!fs.snapshot) throw std::invalid_argument("interim_mttkrp: missing snapshot");
  const CooObservations masked =
      masked_reconstruction(p.observations, fs.snapshot->u, fs.snapshot->v, fs.snapshot->w);
  return interim_mttkrp(p, fs, mode, masked);
}

Matrix interim_mttkrp(const CompletionProblem& p, const FactorSet& fs, int mode,
                      const CooObservations& masked_snapshot) {
  if (!fs.snapshot) throw std::invalid_argument("interim_mttkrp: missing snapshot");
  if (mode < 1 || mode > 3)
    throw std::invalid_argument("interim_mttkrp: mode must be 1, 2 or 3");
  const int a = (mode == 1) ? 2 : 1;
  const int b = (mode == 3) ? 2 : 3;
  const Matrix& fa = fs.fine(a);
  const Matrix& fb = fs.fine(b);
  const FactorSet::Snapshot& snap = *fs.snapshot;
  auto snap_factor = [&snap](int m) -> const Matrix& {
    return m == 1 ? snap.u : (m == 2 ? snap.v : snap.w);
  };

  Matrix out = mttkrp_sparse(p.observations, fa, fb, mode);
  // Full MTTKRP of the snapshot reconstruction via the Gram identity.
  const Matrix cross =
      hadamard(matmul_transposed_left(fa, snap_factor(a)), matmul_transposed_left(fb, snap_factor(b)));
  add_scaled(out, 1.0, matmul(snap_factor(mode), transpose(cross)));
  add_scaled(out, -1.0, mttkrp_sparse(masked_snapshot, fa, fb, mode));
  return out;
}

}  // namespace mrtc
