#include "mrtc/experiment.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>

namespace mrtc {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool to_bool(const std::string& v, bool& out) {
  if (v == "true" || v == "1") { out = true; return true; }
  if (v == "false" || v == "0") { out = false; return true; }
  return false;
}

bool to_int(const std::string& v, long long& out) {
  char* end = nullptr;
  errno = 0;
  out = std::strtoll(v.c_str(), &end, 10);
  return !v.empty() && errno == 0 && end == v.c_str() + v.size();
}

bool to_double(const std::string& v, double& out) {
  char* end = nullptr;
  out = std::strtod(v.c_str(), &end);
  return !v.empty() && end == v.c_str() + v.size() && std::isfinite(out);
}

bool to_kind(const std::string& v, ModeKind& out) {
  if (v == "continuous") { out = ModeKind::continuous; return true; }
  if (v == "categorical") { out = ModeKind::categorical; return true; }
  return false;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");

  ExperimentConfig cfg;
  std::array<ExperimentConfig::CoarseInput, 3> coarse_slots;
  std::string line;
  long lineno = 0;
  bool have_mode = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) throw ParseError(path, lineno, "expected key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError(path, lineno, "expected key=value");

    long long ll = 0;
    double d = 0.0;
    bool b = false;
    auto bad = [&]() { return ParseError(path, lineno, "malformed value for '" + key + "'"); };

    if (key == "mode") {
      if (value == "synth") cfg.mode = ExperimentConfig::Mode::synth;
      else if (value == "complete") cfg.mode = ExperimentConfig::Mode::complete;
      else if (value == "eval") cfg.mode = ExperimentConfig::Mode::eval;
      else if (value == "forecast") cfg.mode = ExperimentConfig::Mode::forecast;
      else throw ParseError(path, lineno, "mode must be synth, complete, eval or forecast");
      have_mode = true;
    } else if (key == "seed") {
      if (!to_int(value, ll) || ll < 0) throw bad();
      cfg.solver.seed = static_cast<std::uint64_t>(ll);
    } else if (key == "rank") {
      if (!to_int(value, ll) || ll < 1) throw bad();
      cfg.solver.rank = ll;
    } else if (key == "coarse_level_iters") {
      if (!to_int(value, ll) || ll < 0) throw bad();
      cfg.solver.coarse_level_iters = static_cast<int>(ll);
    } else if (key == "fine_level_iters") {
      if (!to_int(value, ll) || ll < 0) throw bad();
      cfg.solver.fine_level_iters = static_cast<int>(ll);
    } else if (key == "stage1_iters") {
      if (!to_int(value, ll) || ll < 0) throw bad();
      cfg.solver.stage1_iters = static_cast<int>(ll);
    } else if (key == "jacobi_rounds") {
      if (!to_int(value, ll) || ll < 1) throw bad();
      cfg.solver.jacobi_rounds = static_cast<int>(ll);
    } else if (key == "jacobi_weight") {
      if (!to_double(value, d)) throw bad();
      cfg.solver.jacobi_weight = d;
    } else if (key == "diag_epsilon") {
      if (!to_double(value, d)) throw bad();
      cfg.solver.diag_epsilon = d;
    } else if (key == "lambda_decay") {
      if (!to_double(value, d)) throw bad();
      cfg.solver.lambda_decay = d;
    } else if (key == "tolerance") {
      if (!to_double(value, d)) throw bad();
      cfg.solver.tolerance = d;
    } else if (key == "min_mode_size") {
      if (!to_int(value, ll) || ll < 2) throw bad();
      cfg.solver.min_mode_size = ll;
    } else if (key == "mode_size") {
      if (!to_int(value, ll) || ll < 2) throw bad();
      cfg.mode_size = ll;
    } else if (key == "coarse_size") {
      if (!to_int(value, ll) || ll < 1) throw bad();
      cfg.coarse_size = ll;
    } else if (key == "mask_fraction") {
      if (!to_double(value, d)) throw bad();
      cfg.mask_fraction = d;
    } else if (key == "use_coarse1") {
      if (!to_bool(value, b)) throw bad();
      cfg.use_coarse1 = b;
    } else if (key == "use_coarse2") {
      if (!to_bool(value, b)) throw bad();
      cfg.use_coarse2 = b;
    } else if (key == "p1_known") {
      if (!to_bool(value, b)) throw bad();
      cfg.p1_known = b;
    } else if (key == "p2_known") {
      if (!to_bool(value, b)) throw bad();
      cfg.p2_known = b;
    } else if (key == "run_oracle") {
      if (!to_bool(value, b)) throw bad();
      cfg.run_oracle = b;
    } else if (key == "run_cpc") {
      if (!to_bool(value, b)) throw bad();
      cfg.run_cpc = b;
    } else if (key == "observations") {
      cfg.observations_path = value;
    } else if (key == "ground_truth") {
      cfg.ground_truth_path = value;
    } else if (key == "report") {
      cfg.report_path = value;
    } else if (key == "report_oracle") {
      cfg.report_oracle_path = value;
    } else if (key == "report_cpc") {
      cfg.report_cpc_path = value;
    } else if (key == "factors_out") {
      cfg.factors_out_path = value;
    } else if (key == "factors_in") {
      cfg.factors_in_path = value;
    } else if (key == "timings") {
      if (!to_bool(value, b)) throw bad();
      cfg.timings = b;
    } else if (key == "horizon") {
      if (!to_int(value, ll) || ll < 1) throw bad();
      cfg.horizon = ll;
    } else if (key == "length_scale") {
      if (!to_double(value, d)) throw bad();
      cfg.length_scale = d;
    } else if (key == "gp_noise") {
      if (!to_double(value, d)) throw bad();
      cfg.gp_noise = d;
    } else if (key == "cumulative") {
      if (!to_bool(value, b)) throw bad();
      cfg.cumulative = b;
    } else if (key == "future") {
      cfg.future_path = value;
    } else if (key == "forecast_out") {
      cfg.forecast_out_path = value;
    } else if (key == "quiet") {
      if (!to_bool(value, b)) throw bad();
      cfg.quiet = b;
    } else if (key == "coarse1" || key == "coarse2" || key == "coarse3") {
      const int m = key[6] - '0';
      coarse_slots[m - 1].mode = m;
      coarse_slots[m - 1].tensor_path = value;
    } else if (key == "agg1" || key == "agg2" || key == "agg3") {
      const int m = key[3] - '0';
      coarse_slots[m - 1].mode = m;  // tensor path may arrive later
      coarse_slots[m - 1].aggregation_path = value;
    } else if (key == "mode1_kind" || key == "mode2_kind" || key == "mode3_kind") {
      const int m = key[4] - '0';
      ModeKind kind;
      if (!to_kind(value, kind)) throw bad();
      cfg.mode_kinds[m - 1] = kind;
    } else {
      throw ParseError(path, lineno, "unknown key '" + key + "'");
    }
  }
  if (!have_mode) throw ParseError(path, 0, "missing required key 'mode'");
  for (const auto& slot : coarse_slots) {
    if (slot.mode == 0) continue;
    if (slot.tensor_path.empty())
      throw ParseError(path, 0, "agg" + std::to_string(slot.mode) + " given without coarse" +
                                    std::to_string(slot.mode));
    cfg.coarse_inputs.push_back(slot);
  }
  return cfg;
}

namespace {

void write_summary_line(std::FILE* stream, const std::string& label, double pof_value,
                        const SolveReport& report) {
  double seconds = 0.0;
  for (const SolveRecord& r : report.records) seconds += r.seconds;
  std::fprintf(stream, "%s iterations=%zu pof=%.6f seconds=%.3f\n", label.c_str(),
               report.records.size(), pof_value, seconds);
}

double final_pof(const SolveReport& report) {
  for (auto it = report.records.rbegin(); it != report.records.rend(); ++it)
    if (it->pof) return *it->pof;
  return std::numeric_limits<double>::quiet_NaN();
}

int run_synth(const ExperimentConfig& cfg) {
  const SyntheticInstance inst =
      generate_synthetic(cfg.solver.rank, cfg.mode_size, cfg.coarse_size, cfg.solver.seed);
  const CooObservations obs = sample_mask(inst.x, cfg.mask_fraction, cfg.solver.seed);
  const CompletionProblem problem =
      make_problem(inst, obs, cfg.use_coarse1, cfg.use_coarse2, cfg.p1_known, cfg.p2_known);

  auto [fs, report] = mtc_solve(problem, cfg.solver, &inst.x);
  if (!cfg.report_path.empty()) write_report_csv(cfg.report_path, report, cfg.timings);
  if (!cfg.factors_out_path.empty()) write_factors_file(cfg.factors_out_path, fs);
  if (!cfg.quiet) write_summary_line(stdout, "mtc", final_pof(report), report);

  if (cfg.run_oracle) {
    auto [ofs, oreport] = oracle_cpd(inst.x, cfg.solver.rank, cfg.solver);
    if (!cfg.report_oracle_path.empty())
      write_report_csv(cfg.report_oracle_path, oreport, cfg.timings);
    if (!cfg.quiet) write_summary_line(stdout, "oracle_cpd", final_pof(oreport), oreport);
  }
  if (cfg.run_cpc) {
    auto [cfs, creport] = cpc_als(obs, cfg.solver.rank, cfg.solver);
    const double p = pof(inst.x, reconstruct(cfs.u, cfs.v, cfs.w));
    if (!cfg.report_cpc_path.empty()) write_report_csv(cfg.report_cpc_path, creport, cfg.timings);
    if (!cfg.quiet) write_summary_line(stdout, "cpc_als", p, creport);
  }
  return 0;
}

int run_complete(const ExperimentConfig& cfg) {
  if (cfg.observations_path.empty())
    throw std::invalid_argument("complete mode requires observations=PATH");
  CooObservations obs = parse_coo_file(cfg.observations_path);

  CompletionProblem p;
  p.shape = obs.shape();
  p.observations = std::move(obs);
  for (int m = 1; m <= 3; ++m) {
    p.mode(m).kind = cfg.mode_kinds[m - 1];
    p.mode(m).fine_size = p.shape.dim(m);
  }
  for (const auto& ci : cfg.coarse_inputs) {
    const CooObservations coarse_coo = parse_coo_file(ci.tensor_path);
    p.coarse[ci.mode - 1] = densify(coarse_coo);
    ModeSpec& spec = p.mode(ci.mode);
    spec.coarse_size = coarse_coo.shape().dim(ci.mode);
    if (!ci.aggregation_path.empty()) {
      spec.aggregation = AggregationState::known;
      spec.map = parse_aggregation_file(ci.aggregation_path);
    } else {
      spec.aggregation = AggregationState::unknown;
    }
  }

  std::optional<DenseTensor3> truth;
  if (!cfg.ground_truth_path.empty()) truth = densify(parse_coo_file(cfg.ground_truth_path));

  auto [fs, report] = mtc_solve(p, cfg.solver, truth ? &*truth : nullptr);
  if (!cfg.report_path.empty()) write_report_csv(cfg.report_path, report, cfg.timings);
  if (!cfg.factors_out_path.empty()) write_factors_file(cfg.factors_out_path, fs);
  if (!cfg.quiet) {
    const double p_final =
        truth ? pof(*truth, reconstruct(fs.u, fs.v, fs.w)) : final_pof(report);
    write_summary_line(stdout, "mtc", p_final, report);
  }
  return 0;
}

int run_eval(const ExperimentConfig& cfg) {
  if (cfg.factors_in_path.empty() || cfg.ground_truth_path.empty())
    throw std::invalid_argument("eval mode requires factors_in=PATH and ground_truth=PATH");
  const FactorSet fs = read_factors_file(cfg.factors_in_path);
  const DenseTensor3 truth = densify(parse_coo_file(cfg.ground_truth_path));
  const double p = pof(truth, reconstruct(fs.u, fs.v, fs.w));
  std::printf("eval pof=%.6f\n", p);
  return 0;
}

int run_forecast(const ExperimentConfig& cfg) {
  if (cfg.factors_in_path.empty())
    throw std::invalid_argument("forecast mode requires factors_in=PATH");
  const FactorSet fs = read_factors_file(cfg.factors_in_path);
  const Matrix w_future = gp_forecast(fs.w, cfg.horizon, cfg.length_scale, cfg.gp_noise);

  if (!cfg.forecast_out_path.empty()) {
    std::ofstream out(cfg.forecast_out_path);
    if (!out) throw ParseError(cfg.forecast_out_path, 0, "cannot open file for writing");
    for (index_t i = 0; i < w_future.rows(); ++i) {
      for (index_t c = 0; c < w_future.cols(); ++c) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", w_future(i, c));
        out << (c ? "," : "") << buf;
      }
      out << '\n';
    }
  }
  if (!cfg.future_path.empty()) {
    const DenseTensor3 future = densify(parse_coo_file(cfg.future_path));
    const double p = evaluate_prediction(future, fs.u, fs.v, w_future, cfg.cumulative);
    std::printf("forecast pof=%.6f horizon=%lld%s\n", p, static_cast<long long>(cfg.horizon),
                cfg.cumulative ? " cumulative" : "");
  } else if (!cfg.quiet) {
    std::printf("forecast horizon=%lld rows=%lld\n", static_cast<long long>(cfg.horizon),
                static_cast<long long>(w_future.rows()));
  }
  return 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  const std::vector<std::string> errs = check_config(cfg.solver);
  if (!errs.empty()) {
    std::string joined = "invalid solver configuration:";
    for (const std::string& e : errs) joined += " [" + e + "]";
    throw std::invalid_argument(joined);
  }
  switch (cfg.mode) {
    case ExperimentConfig::Mode::synth: return run_synth(cfg);
    case ExperimentConfig::Mode::complete: return run_complete(cfg);
    case ExperimentConfig::Mode::eval: return run_eval(cfg);
    case ExperimentConfig::Mode::forecast: return run_forecast(cfg);
  }
  return 1;
}

}  // namespace mrtc
