#include "mrtc/multires.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "mrtc/rng.hpp"

namespace mrtc {

std::vector<index_t> subsample_continuous(index_t n) {
  if (n < 1) throw std::invalid_argument("subsample_continuous: n must be >= 1");
  std::vector<index_t> sel;
  sel.reserve(static_cast<std::size_t>((n + 1) / 2));
  for (index_t i = 0; i < n; i += 2) sel.push_back(i);
  return sel;
}

std::vector<index_t> count_slab_density(const CompletionProblem& p, int mode, bool coarse_aspect) {
  if (mode < 1 || mode > 3)
    throw std::invalid_argument("count_slab_density: mode must be 1, 2 or 3");
  const ModeSpec& spec = p.mode(mode);
  if (coarse_aspect) {
    if (!spec.aggregated())
      throw std::invalid_argument("count_slab_density: mode " + std::to_string(mode) +
                                  " has no coarse aspect");
    // Only the mode's own coarse tensor carries the coarse aspect.
    std::vector<index_t> counts(static_cast<std::size_t>(spec.coarse_size), 0);
    const DenseTensor3& c = p.coarse_tensor(mode);
    const Shape3 s = c.shape();
    for (index_t i = 0; i < s.i1; ++i)
      for (index_t j = 0; j < s.i2; ++j)
        for (index_t k = 0; k < s.i3; ++k)
          if (c(i, j, k) != 0.0)
            ++counts[static_cast<std::size_t>(mode == 1 ? i : (mode == 2 ? j : k))];
    return counts;
  }

  if (spec.kind == ModeKind::continuous)
    throw std::invalid_argument("count_slab_density: mode " + std::to_string(mode) +
                                " is continuous");
  std::vector<index_t> counts(static_cast<std::size_t>(spec.fine_size), 0);
  for (const CooEntry& e : p.observations.entries())
    if (e.value != 0.0)
      ++counts[static_cast<std::size_t>(mode == 1 ? e.i : (mode == 2 ? e.j : e.k))];
  for (int s = 1; s <= 3; ++s) {
    if (s == mode || !p.has_coarse(s)) continue;  // mode s's own coarse aspect differs
    const DenseTensor3& c = p.coarse_tensor(s);
    const Shape3 cs = c.shape();
    for (index_t i = 0; i < cs.i1; ++i)
      for (index_t j = 0; j < cs.i2; ++j)
        for (index_t k = 0; k < cs.i3; ++k)
          if (c(i, j, k) != 0.0)
            ++counts[static_cast<std::size_t>(mode == 1 ? i : (mode == 2 ? j : k))];
  }
  return counts;
}

std::vector<index_t> subsample_categorical(const std::vector<index_t>& counts) {
  const index_t n = static_cast<index_t>(counts.size());
  if (n < 1) throw std::invalid_argument("subsample_categorical: empty count vector");
  for (index_t c : counts)
    if (c < 0) throw std::invalid_argument("subsample_categorical: negative count");
  std::vector<index_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&counts](index_t a, index_t b) {
    if (counts[static_cast<std::size_t>(a)] != counts[static_cast<std::size_t>(b)])
      return counts[static_cast<std::size_t>(a)] > counts[static_cast<std::size_t>(b)];
    return a < b;
  });
  order.resize(static_cast<std::size_t>((n + 1) / 2));
  std::sort(order.begin(), order.end());
  return order;
}

SelectionSet select_all_aspects(const CompletionProblem& p) {
  SelectionSet sel;
  for (int m = 1; m <= 3; ++m) {
    const ModeSpec& spec = p.mode(m);
    sel.fine[m - 1] = (spec.kind == ModeKind::continuous)
                          ? subsample_continuous(spec.fine_size)
                          : subsample_categorical(count_slab_density(p, m, false));
    if (!spec.aggregated()) continue;
    if (spec.aggregation == AggregationState::known) {
      // Keep exactly the coarse rows reached by the fine selection; anything
      // else would orphan selected fine indices from the restricted map.
      std::vector<bool> hit(static_cast<std::size_t>(spec.coarse_size), false);
      for (index_t i : sel.fine[m - 1])
        hit[static_cast<std::size_t>(spec.map->assignment[static_cast<std::size_t>(i)])] = true;
      for (index_t c = 0; c < spec.coarse_size; ++c)
        if (hit[static_cast<std::size_t>(c)]) sel.coarse[m - 1].push_back(c);
    } else {
      sel.coarse[m - 1] = subsample_categorical(count_slab_density(p, m, true));
    }
  }
  return sel;
}

namespace {

// rank_of[old] = compacted new index, or -1 when dropped.
std::vector<index_t> rank_map(const std::vector<index_t>& selected, index_t size) {
  std::vector<index_t> ranks(static_cast<std::size_t>(size), -1);
  for (std::size_t r = 0; r < selected.size(); ++r) {
    const index_t idx = selected[r];
    if (idx < 0 || idx >= size)
      throw std::invalid_argument("subsample_problem: selection index out of range");
    ranks[static_cast<std::size_t>(idx)] = static_cast<index_t>(r);
  }
  return ranks;
}

DenseTensor3 gather_tensor(const DenseTensor3& t, const std::vector<index_t>& s1,
                           const std::vector<index_t>& s2, const std::vector<index_t>& s3) {
  DenseTensor3 out({static_cast<index_t>(s1.size()), static_cast<index_t>(s2.size()),
                    static_cast<index_t>(s3.size())});
  for (std::size_t a = 0; a < s1.size(); ++a)
    for (std::size_t b = 0; b < s2.size(); ++b)
      for (std::size_t c = 0; c < s3.size(); ++c)
        out(static_cast<index_t>(a), static_cast<index_t>(b), static_cast<index_t>(c)) =
            t(s1[a], s2[b], s3[c]);
  return out;
}

}  // namespace

CompletionProblem subsample_problem(const CompletionProblem& p, const SelectionSet& sel) {
  std::array<std::vector<index_t>, 3> fine_ranks;
  for (int m = 1; m <= 3; ++m) {
    if (sel.fine[m - 1].empty())
      throw std::invalid_argument("subsample_problem: missing selection for mode " +
                                  std::to_string(m));
    fine_ranks[m - 1] = rank_map(sel.fine[m - 1], p.shape.dim(m));
  }

  CompletionProblem out;
  out.shape = {static_cast<index_t>(sel.fine[0].size()), static_cast<index_t>(sel.fine[1].size()),
               static_cast<index_t>(sel.fine[2].size())};
  out.lambda = p.lambda;

  std::vector<CooEntry> kept;
  for (const CooEntry& e : p.observations.entries()) {
    const index_t ni = fine_ranks[0][static_cast<std::size_t>(e.i)];
    const index_t nj = fine_ranks[1][static_cast<std::size_t>(e.j)];
    const index_t nk = fine_ranks[2][static_cast<std::size_t>(e.k)];
    if (ni >= 0 && nj >= 0 && nk >= 0) kept.push_back({ni, nj, nk, e.value});
  }
  out.observations = CooObservations(out.shape, std::move(kept));

  for (int m = 1; m <= 3; ++m) {
    const ModeSpec& spec = p.mode(m);
    ModeSpec& nspec = out.mode(m);
    nspec.kind = spec.kind;
    nspec.fine_size = out.shape.dim(m);
    if (!spec.aggregated()) continue;
    const std::vector<index_t>& csel = sel.coarse[m - 1];
    if (csel.empty())
      throw std::invalid_argument("subsample_problem: missing coarse selection for mode " +
                                  std::to_string(m));
    nspec.aggregation = spec.aggregation;
    nspec.coarse_size = static_cast<index_t>(csel.size());
    std::vector<double> slab_scale;
    if (spec.aggregation == AggregationState::known) {
      const std::vector<index_t> coarse_ranks = rank_map(csel, spec.coarse_size);
      AggregationMatrix restricted;
      restricted.fine_size = nspec.fine_size;
      restricted.coarse_size = nspec.coarse_size;
      restricted.assignment.reserve(sel.fine[m - 1].size());
      for (index_t i : sel.fine[m - 1]) {
        const index_t c =
            coarse_ranks[static_cast<std::size_t>(spec.map->assignment[static_cast<std::size_t>(i)])];
        if (c < 0)
          throw std::invalid_argument(
              "subsample_problem: coarse selection drops the parent of a selected fine index "
              "in mode " + std::to_string(m));
        restricted.assignment.push_back(c);
      }
      // A kept coarse slab still aggregates every fine child of the original
      // level, while the restricted map only reaches the selected children.
      // Scale each slab by its kept-children fraction to keep magnitudes
      // comparable, and once any child is gone, stop treating the map as
      // exact: a hard Q = P V constraint against full-population aggregates
      // mis-poses the lower level (the auxiliary factor becomes free there;
      // the complete map still rules the finest level).
      std::vector<index_t> full_count(csel.size(), 0);
      std::vector<index_t> kept_count(csel.size(), 0);
      for (index_t i = 0; i < spec.fine_size; ++i) {
        const index_t c =
            coarse_ranks[static_cast<std::size_t>(spec.map->assignment[static_cast<std::size_t>(i)])];
        if (c >= 0) ++full_count[static_cast<std::size_t>(c)];
      }
      for (index_t c : restricted.assignment) ++kept_count[static_cast<std::size_t>(c)];
      slab_scale.resize(csel.size());
      bool exact = true;
      for (std::size_t c = 0; c < csel.size(); ++c) {
        slab_scale[c] = static_cast<double>(kept_count[c]) / static_cast<double>(full_count[c]);
        if (kept_count[c] != full_count[c]) exact = false;
      }
      if (exact)
        nspec.map = std::move(restricted);
      else
        nspec.aggregation = AggregationState::unknown;
    }
    const std::vector<index_t>* dims[3] = {&sel.fine[0], &sel.fine[1], &sel.fine[2]};
    dims[m - 1] = &csel;
    DenseTensor3 sub = gather_tensor(p.coarse_tensor(m), *dims[0], *dims[1], *dims[2]);
    if (!slab_scale.empty()) {
      const Shape3 cs = sub.shape();
      for (index_t i = 0; i < cs.i1; ++i)
        for (index_t j = 0; j < cs.i2; ++j)
          for (index_t k = 0; k < cs.i3; ++k) {
            const index_t c = m == 1 ? i : (m == 2 ? j : k);
            sub(i, j, k) *= slab_scale[static_cast<std::size_t>(c)];
          }
    }
    out.coarse[m - 1] = std::move(sub);
  }
  return out;
}

Matrix interpolate_continuous(const Matrix& low, index_t target_rows) {
  if (target_rows < 1)
    throw std::invalid_argument("interpolate_continuous: target_rows must be >= 1");
  if (low.rows() != (target_rows + 1) / 2)
    throw std::invalid_argument("interpolate_continuous: low.rows() must equal ceil(target/2)");
  Matrix out(target_rows, low.cols());
  for (index_t t = 0; t < target_rows; ++t) {
    if (t % 2 == 0) {  // 1-based odd row: direct copy
      const double* src = low.row(t / 2);
      double* dst = out.row(t);
      for (index_t c = 0; c < low.cols(); ++c) dst[c] = src[c];
    } else {  // 1-based even row: midpoint, or boundary copy past the end
      const index_t lo = (t - 1) / 2;
      const index_t hi = (t + 1) / 2;
      double* dst = out.row(t);
      if (hi < low.rows()) {
        const double* a = low.row(lo);
        const double* b = low.row(hi);
        for (index_t c = 0; c < low.cols(); ++c) dst[c] = 0.5 * (a[c] + b[c]);
      } else {
        const double* a = low.row(low.rows() - 1);
        for (index_t c = 0; c < low.cols(); ++c) dst[c] = a[c];
      }
    }
  }
  return out;
}

Matrix interpolate_categorical(const Matrix& low, const std::vector<index_t>& selected,
                               index_t target_rows, std::uint64_t seed) {
  if (static_cast<index_t>(selected.size()) != low.rows())
    throw std::invalid_argument("interpolate_categorical: selection size != low.rows()");
  Matrix out(target_rows, low.cols());
  std::vector<index_t> source(static_cast<std::size_t>(target_rows), -1);
  for (std::size_t r = 0; r < selected.size(); ++r) {
    if (selected[r] < 0 || selected[r] >= target_rows)
      throw std::invalid_argument("interpolate_categorical: selection index out of range");
    source[static_cast<std::size_t>(selected[r])] = static_cast<index_t>(r);
  }
  Rng rng(seed);
  for (index_t t = 0; t < target_rows; ++t) {
    double* dst = out.row(t);
    if (source[static_cast<std::size_t>(t)] >= 0) {
      const double* src = low.row(source[static_cast<std::size_t>(t)]);
      for (index_t c = 0; c < low.cols(); ++c) dst[c] = src[c];
    } else {
      for (index_t c = 0; c < low.cols(); ++c) dst[c] = rng.symmetric();
    }
  }
  return out;
}

FactorSet interpolate_solution(const CompletionProblem& p_high, const SelectionSet& sel,
                               const FactorSet& low_fs, std::uint64_t seed) {
  FactorSet out;
  for (int m = 1; m <= 3; ++m) {
    const ModeSpec& spec = p_high.mode(m);
    const Matrix& low = low_fs.fine(m);
    if (static_cast<index_t>(sel.fine[m - 1].size()) != low.rows())
      throw std::invalid_argument("interpolate_solution: selection does not match low factor");
    out.fine(m) = (spec.kind == ModeKind::continuous)
                      ? interpolate_continuous(low, spec.fine_size)
                      : interpolate_categorical(low, sel.fine[m - 1], spec.fine_size,
                                                derive_seed(seed, static_cast<std::uint64_t>(m)));
  }
  for (int m = 1; m <= 3; ++m) {
    const ModeSpec& spec = p_high.mode(m);
    if (!spec.aggregated()) continue;
    if (spec.aggregation == AggregationState::known) {
      out.aux[m - 1] = apply_aggregation(*spec.map, out.fine(m));
    } else {
      out.aux[m - 1] =
          interpolate_categorical(low_fs.aux[m - 1], sel.coarse[m - 1], spec.coarse_size,
                                  derive_seed(seed, static_cast<std::uint64_t>(10 + m)));
    }
  }
  out.snapshot = FactorSet::Snapshot{out.u, out.v, out.w};
  return out;
}

ResolutionHierarchy build_hierarchy(const CompletionProblem& p, index_t min_mode_size) {
  if (min_mode_size < 2)
    throw std::invalid_argument("build_hierarchy: min_mode_size must be >= 2");
  std::vector<CompletionProblem> levels{p};      // finest first, reversed below
  std::vector<SelectionSet> transitions;
  for (;;) {
    const CompletionProblem& cur = levels.back();
    bool descend = true;
    for (int m = 1; m <= 3; ++m)
      if ((cur.shape.dim(m) + 1) / 2 < min_mode_size) descend = false;
    if (!descend) break;
    SelectionSet sel = select_all_aspects(cur);
    CompletionProblem sub = subsample_problem(cur, sel);
    if (!validate(sub).empty()) break;  // e.g. a known-P coarse size caught up with the fine size
    transitions.push_back(std::move(sel));
    levels.push_back(std::move(sub));
  }
  ResolutionHierarchy h;
  h.levels.assign(levels.rbegin(), levels.rend());
  h.transitions.assign(transitions.rbegin(), transitions.rend());
  return h;
}

}  // namespace mrtc
