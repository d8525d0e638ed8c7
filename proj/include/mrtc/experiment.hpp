#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrtc/io.hpp"
#include "mrtc/synth.hpp"

namespace mrtc {

// One experiment, loaded from a flat key=value config file.
//
// Modes:
//   synth     generate an instance, sample a mask, run the solver (plus the
//             reference baselines on request) and write report rows
//   complete  same pipeline on ingested observation/coarse/aggregation files
//   eval      PoF of a stored factor set against a ground-truth tensor
//   forecast  extrapolate the time factor with a GP and optionally score it
struct ExperimentConfig {
  enum class Mode { synth, complete, eval, forecast };
  Mode mode = Mode::synth;

  SolverConfig solver;

  // synth inputs
  index_t mode_size = 125;
  index_t coarse_size = 12;
  double mask_fraction = 0.03;
  bool use_coarse1 = true;
  bool use_coarse2 = true;
  bool p1_known = false;
  bool p2_known = true;
  bool run_oracle = false;
  bool run_cpc = false;

  // complete inputs
  std::string observations_path;
  struct CoarseInput {
    int mode = 0;
    std::string tensor_path;
    std::string aggregation_path;  // empty: aggregation unknown
  };
  std::vector<CoarseInput> coarse_inputs;
  std::array<ModeKind, 3> mode_kinds = {ModeKind::categorical, ModeKind::categorical,
                                        ModeKind::continuous};
  std::string ground_truth_path;  // optional full tensor for PoF reporting

  // outputs
  std::string report_path;
  std::string report_oracle_path;
  std::string report_cpc_path;
  std::string factors_out_path;
  bool timings = false;

  // eval / forecast inputs
  std::string factors_in_path;
  index_t horizon = 7;
  double length_scale = 10.0;
  double gp_noise = 1e-4;
  bool cumulative = false;
  std::string future_path;       // optional true future tensor
  std::string forecast_out_path; // W_future rows as CSV

  bool quiet = false;
};

// Loads a config file of '#'-commented key=value lines; unknown keys and
// malformed values are reported with their line number.
ExperimentConfig load_experiment_config(const std::string& path);

// Runs the experiment; returns 0 on success. Errors propagate as exceptions
// (the CLI turns them into nonzero exit codes).
int run_experiment(const ExperimentConfig& cfg);

}  // namespace mrtc
