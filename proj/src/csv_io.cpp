#include "qread/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "qread/errors.hpp"

namespace qread {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw runtime_breach("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw runtime_breach("cannot open for reading: " + path.string());
  return in;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw runtime_breach("write failed: " + path.string());
}

struct Row {
  double t;
  std::vector<double> cols;
};

std::vector<Row> read_rows(std::ifstream& in, const std::string& expected_header,
                           std::size_t cols, const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw runtime_breach("empty file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header)
    throw runtime_breach("unexpected header in " + path.string() + ": got '" + line +
                         "', want '" + expected_header + "'");
  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    Row row;
    std::string cell;
    for (std::size_t c = 0; c < cols; ++c) {
      if (!std::getline(ss, cell, ','))
        throw runtime_breach("short row at line " + std::to_string(line_no) + " in " +
                             path.string());
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || !std::isfinite(v))
        throw runtime_breach("bad number at line " + std::to_string(line_no) + " in " +
                             path.string());
      if (c == 0)
        row.t = v;
      else
        row.cols.push_back(v);
    }
    if (std::getline(ss, cell, ','))
      throw runtime_breach("extra column at line " + std::to_string(line_no) + " in " +
                           path.string());
    rows.push_back(std::move(row));
  }
  return rows;
}

void check_times(const std::vector<Row>& rows, const TimeGrid& grid, std::size_t expected,
                 const std::filesystem::path& path) {
  if (rows.size() != expected)
    throw runtime_breach(path.string() + ": expected " + std::to_string(expected) +
                         " rows, found " + std::to_string(rows.size()));
  const double tol = 1e-9 * std::max(1.0, grid.horizon());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (std::abs(rows[k].t - grid.time(k)) > tol)
      throw runtime_breach(path.string() + ": time mismatch at row " + std::to_string(k));
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_gaussian_record_csv(const std::filesystem::path& path, const GaussianRecord& record) {
  auto out = open_out(path);
  out << "t,dy\n";
  for (std::size_t k = 0; k < record.dy.size(); ++k)
    out << format_double(record.grid.time(k)) << ',' << format_double(record.dy[k]) << '\n';
  check_written(out, path);
}

void write_count_record_csv(const std::filesystem::path& path, const CountRecord& record) {
  auto out = open_out(path);
  out << "t,dn\n";
  for (std::size_t k = 0; k < record.dn.size(); ++k)
    out << format_double(record.grid.time(k)) << ',' << int(record.dn[k]) << '\n';
  check_written(out, path);
}

void write_trajectory_csv(const std::filesystem::path& path, const HiddenTrajectory& traj) {
  auto out = open_out(path);
  out << "t,x\n";
  for (std::size_t k = 0; k < traj.x.size(); ++k)
    out << format_double(traj.grid.time(k)) << ',' << int(traj.x[k]) << '\n';
  check_written(out, path);
}

void write_llr_trace_csv(const std::filesystem::path& path, const LLRTrace& trace) {
  auto out = open_out(path);
  out << "t,llr,mu\n";
  for (std::size_t k = 0; k < trace.llr.size(); ++k)
    out << format_double(trace.grid.time(k)) << ',' << format_double(trace.llr[k]) << ','
        << format_double(trace.mu[k]) << '\n';
  check_written(out, path);
}

void write_poisson_trace_csv(const std::filesystem::path& path, const PoissonLLRTrace& trace) {
  auto out = open_out(path);
  out << "t,llr,nu\n";
  for (std::size_t k = 0; k < trace.llr.size(); ++k)
    out << format_double(trace.grid.time(k)) << ',' << format_double(trace.llr[k]) << ','
        << format_double(trace.nu[k]) << '\n';
  check_written(out, path);
}

GaussianRecord read_gaussian_record_csv(const std::filesystem::path& path, const TimeGrid& grid) {
  auto in = open_in(path);
  const auto rows = read_rows(in, "t,dy", 2, path);
  check_times(rows, grid, grid.steps(), path);
  GaussianRecord record{grid, std::vector<double>(grid.steps())};
  for (std::size_t k = 0; k < rows.size(); ++k) record.dy[k] = rows[k].cols[0];
  return record;
}

CountRecord read_count_record_csv(const std::filesystem::path& path, const TimeGrid& grid,
                                  const RateSchedule& lambda0) {
  auto in = open_in(path);
  const auto rows = read_rows(in, "t,dn", 2, path);
  check_times(rows, grid, grid.steps(), path);
  CountRecord record{grid, std::vector<std::uint8_t>(grid.steps()), lambda0};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double v = rows[k].cols[0];
    if (v != 0.0 && v != 1.0)
      throw runtime_breach(path.string() + ": dn must be 0 or 1 at row " + std::to_string(k));
    record.dn[k] = static_cast<std::uint8_t>(v);
  }
  return record;
}

}  // namespace qread
