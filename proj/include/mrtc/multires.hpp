#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mrtc/kruskal.hpp"
#include "mrtc/problem.hpp"

namespace mrtc {

// The retained fine-resolution indices (0-based, strictly increasing) for
// every aspect of one resolution transition. fine[m-1] covers mode m's fine
// aspect; coarse[m-1] covers its coarse aspect and is empty for modes
// without aggregation.
struct SelectionSet {
  std::array<std::vector<index_t>, 3> fine;
  std::array<std::vector<index_t>, 3> coarse;
};

// Regular-interval selection {0, 2, 4, ...} of size ceil(n/2).
std::vector<index_t> subsample_continuous(index_t n);

// Nonzero count per slab of the given aspect, summed over every stored
// tensor that carries the aspect at that granularity: the observation list
// plus each coarse tensor whose mode sits at the aspect. Fine aspects of
// continuous modes are rejected (they subsample by interval instead).
std::vector<index_t> count_slab_density(const CompletionProblem& p, int mode, bool coarse_aspect);

// Indices of the largest ceil(n/2) counts, ties broken toward the smaller
// index, returned in increasing order.
std::vector<index_t> subsample_categorical(const std::vector<index_t>& counts);

// Selections for one transition of p: continuous fine aspects by interval,
// categorical fine aspects and unknown-aggregation coarse aspects by slab
// density; a known aggregation's coarse aspect keeps exactly the coarse
// indices reached by the fine selection, so the restricted map stays total.
SelectionSet select_all_aspects(const CompletionProblem& p);

// The lower-resolution problem: observations filtered to selected
// coordinates and re-indexed, coarse tensors gathered along their aspect
// selections, known aggregation maps restricted (empty coarse rows dropped),
// mode kinds and lambda unchanged. Kept slabs of a known-aggregation coarse
// tensor are scaled by the fraction of their fine children that survived the
// selection, keeping the restricted constraint consistent with its data.
CompletionProblem subsample_problem(const CompletionProblem& p, const SelectionSet& sel);

// Neighborhood-smoothing upsample for continuous aspects. 1-based target
// rows: odd rows copy the matching low row, even rows average the two
// neighbors, and an even final row copies the last low row.
// Requires low.rows() == ceil(target_rows/2).
Matrix interpolate_continuous(const Matrix& low, index_t target_rows);

// Categorical upsample: selected rows are copied bitwise from the low
// factor, the rest are filled i.i.d. uniform on [-1,1] from the seed.
Matrix interpolate_categorical(const Matrix& low, const std::vector<index_t>& selected,
                               index_t target_rows, std::uint64_t seed);

// Lifts a low-resolution solution to initialize p_high: fine factors by
// their mode's strategy, unknown-aggregation auxiliary factors by the
// categorical strategy on their own selection, known-aggregation auxiliary
// factors recomputed from the lifted fine factor. The snapshot is reset to
// the lifted fine factors.
FactorSet interpolate_solution(const CompletionProblem& p_high, const SelectionSet& sel,
                               const FactorSet& low_fs, std::uint64_t seed);

// Problems ordered coarsest to finest; levels.back() is the original.
// transitions[t] produced levels[t] from levels[t+1].
struct ResolutionHierarchy {
  std::vector<CompletionProblem> levels;
  std::vector<SelectionSet> transitions;
  int depth() const { return static_cast<int>(transitions.size()); }
};

// Recursively subsamples every aspect until another halving would push a
// fine mode below min_mode_size or produce an invalid problem. Categorical
// selections are recomputed per level from that level's counts.
ResolutionHierarchy build_hierarchy(const CompletionProblem& p, index_t min_mode_size);

}  // namespace mrtc
