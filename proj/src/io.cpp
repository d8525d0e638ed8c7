#include "mrtc/io.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace mrtc {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool parse_long(const std::string& token, long long& out) {
  if (token.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtoll(token.c_str(), &end, 10);
  return errno == 0 && end == token.c_str() + token.size();
}

bool parse_double(const std::string& token, double& out) {
  if (token.empty()) return false;
  char* end = nullptr;
  out = std::strtod(token.c_str(), &end);
  // Denormal underflow is fine; overflow yields an infinity and is rejected.
  return end == token.c_str() + token.size() && std::isfinite(out);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

bool significant(const std::string& line) {
  for (char c : line) {
    if (c == '#') return false;
    if (!std::isspace(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

struct LineReader {
  explicit LineReader(const std::string& p) : path(p), in(p) {
    if (!in) throw ParseError(p, 0, "cannot open file");
  }
  // Next significant line; false at end of file.
  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++lineno;
      if (significant(line)) return true;
    }
    return false;
  }
  std::string path;
  std::ifstream in;
  long lineno = 0;
};

}  // namespace

ParseError::ParseError(const std::string& p, long l, const std::string& message)
    : std::runtime_error(l > 0 ? p + ":line " + std::to_string(l) + ": " + message
                               : p + ": " + message),
      path(p),
      line(l) {}

CooObservations parse_coo_file(const std::string& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line)) throw ParseError(path, reader.lineno, "missing shape line 'I1 I2 I3'");
  const std::vector<std::string> shape_tok = split_ws(line);
  long long d[3];
  if (shape_tok.size() != 3 || !parse_long(shape_tok[0], d[0]) || !parse_long(shape_tok[1], d[1]) ||
      !parse_long(shape_tok[2], d[2]) || d[0] < 1 || d[1] < 1 || d[2] < 1)
    throw ParseError(path, reader.lineno, "expected shape line 'I1 I2 I3' with positive sizes");
  const Shape3 shape{d[0], d[1], d[2]};

  std::vector<CooEntry> entries;
  std::unordered_set<std::uint64_t> seen;
  while (reader.next(line)) {
    const std::vector<std::string> tok = split_ws(line);
    long long i, j, k;
    double value;
    if (tok.size() != 4 || !parse_long(tok[0], i) || !parse_long(tok[1], j) ||
        !parse_long(tok[2], k) || !parse_double(tok[3], value))
      throw ParseError(path, reader.lineno, "expected 'i j k value'");
    if (i < 1 || i > shape.i1 || j < 1 || j > shape.i2 || k < 1 || k > shape.i3)
      throw ParseError(path, reader.lineno, "coordinate (" + std::to_string(i) + "," +
                                                std::to_string(j) + "," + std::to_string(k) +
                                                ") out of range");
    const std::uint64_t key =
        (static_cast<std::uint64_t>(i - 1) * static_cast<std::uint64_t>(shape.i2) +
         static_cast<std::uint64_t>(j - 1)) *
            static_cast<std::uint64_t>(shape.i3) +
        static_cast<std::uint64_t>(k - 1);
    if (!seen.insert(key).second)
      throw ParseError(path, reader.lineno, "duplicate coordinate (" + std::to_string(i) + "," +
                                                std::to_string(j) + "," + std::to_string(k) + ")");
    entries.push_back({i - 1, j - 1, k - 1, value});
  }
  return CooObservations(shape, std::move(entries));
}

void write_coo_file(const std::string& path, const CooObservations& obs) {
  std::ofstream out(path);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  const Shape3 s = obs.shape();
  out << s.i1 << ' ' << s.i2 << ' ' << s.i3 << '\n';
  for (const CooEntry& e : obs.entries())
    out << (e.i + 1) << ' ' << (e.j + 1) << ' ' << (e.k + 1) << ' ' << format_double(e.value)
        << '\n';
  if (!out) throw ParseError(path, 0, "write failed");
}

AggregationMatrix parse_aggregation_file(const std::string& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line)) throw ParseError(path, reader.lineno, "missing size line 'J I'");
  const std::vector<std::string> size_tok = split_ws(line);
  long long j_size, i_size;
  if (size_tok.size() != 2 || !parse_long(size_tok[0], j_size) || !parse_long(size_tok[1], i_size) ||
      j_size < 1 || i_size < 1)
    throw ParseError(path, reader.lineno, "expected size line 'J I' with positive sizes");
  if (j_size >= i_size)
    throw ParseError(path, reader.lineno,
                     "coarse size J must be smaller than fine size I (got J=" +
                         std::to_string(j_size) + ", I=" + std::to_string(i_size) + ")");

  AggregationMatrix p;
  p.coarse_size = j_size;
  p.fine_size = i_size;
  p.assignment.assign(static_cast<std::size_t>(i_size), -1);
  while (reader.next(line)) {
    const std::vector<std::string> tok = split_ws(line);
    long long coarse, fine;
    if (tok.size() != 2 || !parse_long(tok[0], coarse) || !parse_long(tok[1], fine))
      throw ParseError(path, reader.lineno, "expected 'coarse_index fine_index'");
    if (coarse < 1 || coarse > j_size)
      throw ParseError(path, reader.lineno, "coarse index " + std::to_string(coarse) +
                                                " out of range");
    if (fine < 1 || fine > i_size)
      throw ParseError(path, reader.lineno, "fine index " + std::to_string(fine) + " out of range");
    if (p.assignment[static_cast<std::size_t>(fine - 1)] != -1)
      throw ParseError(path, reader.lineno, "fine index " + std::to_string(fine) +
                                                " assigned more than once");
    p.assignment[static_cast<std::size_t>(fine - 1)] = coarse - 1;
  }
  for (long long f = 0; f < i_size; ++f)
    if (p.assignment[static_cast<std::size_t>(f)] == -1)
      throw ParseError(path, 0, "fine index " + std::to_string(f + 1) + " unassigned");
  const std::vector<std::string> errs = check_aggregation(p);
  if (!errs.empty()) throw ParseError(path, 0, errs.front());
  return p;
}

void write_aggregation_file(const std::string& path, const AggregationMatrix& p) {
  std::ofstream out(path);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  out << p.coarse_size << ' ' << p.fine_size << '\n';
  for (index_t f = 0; f < p.fine_size; ++f)
    out << (p.assignment[static_cast<std::size_t>(f)] + 1) << ' ' << (f + 1) << '\n';
  if (!out) throw ParseError(path, 0, "write failed");
}

namespace {

void write_factor_block(std::ofstream& out, const char* name, const Matrix& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (index_t i = 0; i < m.rows(); ++i) {
    for (index_t c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_double(m(i, c));
    }
    out << '\n';
  }
}

Matrix read_factor_block(LineReader& reader, const std::string& expected_name, index_t rank) {
  std::string line;
  if (!reader.next(line))
    throw ParseError(reader.path, reader.lineno, "missing factor block '" + expected_name + "'");
  const std::vector<std::string> tok = split_ws(line);
  long long rows, cols;
  if (tok.size() != 3 || tok[0] != expected_name || !parse_long(tok[1], rows) ||
      !parse_long(tok[2], cols) || rows < 0 || cols < 0)
    throw ParseError(reader.path, reader.lineno,
                     "expected factor header '" + expected_name + " rows cols'");
  if (rows > 0 && cols != rank)
    throw ParseError(reader.path, reader.lineno, "factor " + expected_name +
                                                     " column count does not match rank");
  Matrix m(rows, rows > 0 ? cols : rank);
  for (long long i = 0; i < rows; ++i) {
    if (!reader.next(line))
      throw ParseError(reader.path, reader.lineno, "unexpected end of factor " + expected_name);
    const std::vector<std::string> vals = split_ws(line);
    if (static_cast<long long>(vals.size()) != cols)
      throw ParseError(reader.path, reader.lineno, "expected " + std::to_string(cols) +
                                                       " values in factor row");
    for (long long c = 0; c < cols; ++c) {
      double v;
      if (!parse_double(vals[static_cast<std::size_t>(c)], v))
        throw ParseError(reader.path, reader.lineno, "malformed value in factor row");
      m(i, c) = v;
    }
  }
  return m;
}

}  // namespace

void write_factors_file(const std::string& path, const FactorSet& fs) {
  std::ofstream out(path);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  out << "rank " << fs.rank() << '\n';
  write_factor_block(out, "U", fs.u);
  write_factor_block(out, "V", fs.v);
  write_factor_block(out, "W", fs.w);
  write_factor_block(out, "Q1", fs.aux[0]);
  write_factor_block(out, "Q2", fs.aux[1]);
  write_factor_block(out, "Q3", fs.aux[2]);
  if (!out) throw ParseError(path, 0, "write failed");
}

FactorSet read_factors_file(const std::string& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line)) throw ParseError(path, reader.lineno, "missing 'rank R' line");
  const std::vector<std::string> tok = split_ws(line);
  long long rank;
  if (tok.size() != 2 || tok[0] != "rank" || !parse_long(tok[1], rank) || rank < 0)
    throw ParseError(path, reader.lineno, "expected 'rank R'");
  FactorSet fs;
  fs.u = read_factor_block(reader, "U", rank);
  fs.v = read_factor_block(reader, "V", rank);
  fs.w = read_factor_block(reader, "W", rank);
  fs.aux[0] = read_factor_block(reader, "Q1", rank);
  fs.aux[1] = read_factor_block(reader, "Q2", rank);
  fs.aux[2] = read_factor_block(reader, "Q3", rank);
  return fs;
}

void write_report_csv(const std::string& path, const SolveReport& report, bool with_timings) {
  std::ofstream out(path);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  out << "level,iteration,lambda,observed_loss,coarse_loss,pof,seconds\n";
  auto row = [&out, with_timings](const SolveRecord& r) {
    out << r.level << ',' << r.iteration << ',' << format_double(r.lambda) << ','
        << format_double(r.observed_loss) << ',' << format_double(r.coarse_loss) << ',';
    if (r.pof) out << format_double(*r.pof);
    out << ',' << format_double(with_timings ? r.seconds : 0.0) << '\n';
  };
  for (const SolveRecord& r : report.records) row(r);
  if (!report.records.empty()) {
    // Summary: total iteration count and wall time, final losses and fit.
    const SolveRecord& last = report.records.back();
    SolveRecord summary = last;
    summary.level = -1;
    summary.iteration = static_cast<int>(report.records.size());
    summary.seconds = 0.0;
    for (const SolveRecord& r : report.records) summary.seconds += r.seconds;
    row(summary);
  }
  if (!out) throw ParseError(path, 0, "write failed");
}

SolveReport read_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line) || line != "level,iteration,lambda,observed_loss,coarse_loss,pof,seconds")
    throw ParseError(path, 1, "missing or malformed header");
  ++lineno;
  SolveReport report;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.push_back("");
    if (fields.size() != 7) throw ParseError(path, lineno, "expected 7 comma-separated fields");
    long long level, iteration;
    SolveRecord r;
    if (!parse_long(fields[0], level) || !parse_long(fields[1], iteration) ||
        !parse_double(fields[2], r.lambda) || !parse_double(fields[3], r.observed_loss) ||
        !parse_double(fields[4], r.coarse_loss) || !parse_double(fields[6], r.seconds))
      throw ParseError(path, lineno, "malformed record");
    r.level = static_cast<int>(level);
    r.iteration = static_cast<int>(iteration);
    if (!fields[5].empty()) {
      double p;
      if (!parse_double(fields[5], p)) throw ParseError(path, lineno, "malformed pof field");
      r.pof = p;
    }
    if (r.level >= 0) report.records.push_back(r);  // summary rows are derived, not stored
  }
  return report;
}

}  // namespace mrtc
