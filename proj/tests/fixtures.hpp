#pragma once

// Shared helpers for building small coupled-completion instances in tests.

#include "mrtc/synth.hpp"
#include "oracles.hpp"

namespace fixtures {

using namespace mrtc;

struct SmallProblem {
  SyntheticInstance inst;
  CompletionProblem problem;
};

// Low-rank instance with both coarse tensors (P1 unknown, P2 known by
// default) and a sampled observation mask.
inline SmallProblem small_problem(index_t mode_size = 12, index_t coarse_size = 3,
                                  index_t rank = 2, double fraction = 0.2,
                                  std::uint64_t seed = 5, bool p1_known = false,
                                  bool p2_known = true) {
  SmallProblem sp{generate_synthetic(rank, mode_size, coarse_size, seed), {}};
  sp.problem = make_problem(sp.inst, sample_mask(sp.inst.x, fraction, seed), true, true,
                            p1_known, p2_known);
  return sp;
}

inline FactorSet random_snapshot_factors(const CompletionProblem& p, index_t rank,
                                         std::uint64_t seed) {
  return random_factors(p, rank, seed);
}

}  // namespace fixtures
