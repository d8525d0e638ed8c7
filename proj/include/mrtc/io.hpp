#pragma once

#include <stdexcept>
#include <string>

#include "mrtc/solver.hpp"

namespace mrtc {

// Parse failure with file position; what() reads "path:line N: message".
struct ParseError : std::runtime_error {
  ParseError(const std::string& path, long line, const std::string& message);
  std::string path;
  long line;  // 0 when the failure is not tied to a line
};

// Text COO tensor file. First significant line "I1 I2 I3"; each following
// line "i j k value" with 1-based indices. '#' lines and blank lines are
// ignored. Rejects malformed lines, duplicate coordinates and out-of-range
// indices with the offending line number.
CooObservations parse_coo_file(const std::string& path);
void write_coo_file(const std::string& path, const CooObservations& obs);

// Aggregation map file. First line "J I"; each following line
// "coarse_index fine_index" (1-based). Every fine index must appear exactly
// once and J < I.
AggregationMatrix parse_aggregation_file(const std::string& path);
void write_aggregation_file(const std::string& path, const AggregationMatrix& p);

// Factor container file: "rank R" then one "name rows cols" block per factor
// (U, V, W, Q1, Q2, Q3; zero rows for absent auxiliaries) with one
// whitespace-separated row per line. Values round-trip exactly.
void write_factors_file(const std::string& path, const FactorSet& fs);
FactorSet read_factors_file(const std::string& path);

// Report CSV with the fixed header
//   level,iteration,lambda,observed_loss,coarse_loss,pof,seconds
// one row per iteration and a trailing summary row with level = -1. The pof
// field is empty when no ground truth was supplied. Unless with_timings is
// set, the seconds column is written as 0 so identical runs produce
// byte-identical files.
void write_report_csv(const std::string& path, const SolveReport& report, bool with_timings);
SolveReport read_report_csv(const std::string& path);

}  // namespace mrtc
