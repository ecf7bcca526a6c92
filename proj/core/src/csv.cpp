#include "surfseg/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace surfseg {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, const std::string& context) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc()) {
    throw Error(ErrorCode::IoError, context + ": cannot parse '" + field + "' as a number");
  }
  return v;
}

std::vector<double> parse_csv_line(const std::string& line, const std::string& context) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t end = line.find(',', start);
    if (end == std::string::npos) end = line.size();
    std::string field = line.substr(start, end - start);
    // Trim trailing CR from Windows-style line endings.
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    if (!field.empty()) out.push_back(parse_double(field, context));
    if (end == line.size()) break;
    start = end + 1;
  }
  return out;
}

std::string join_csv(const std::vector<double>& values) {
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += format_double(values[i]);
  }
  return line;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open for writing: " + path.string());
  return f;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open for reading: " + path.string());
  return f;
}

}  // namespace

void write_grid_csv(const Grid2& g, const std::filesystem::path& path) {
  auto f = open_out(path);
  std::vector<double> row(static_cast<std::size_t>(g.n_cols));
  for (int j = 0; j < g.n_rows; ++j) {
    for (int i = 0; i < g.n_cols; ++i) row[static_cast<std::size_t>(i)] = g.at(j, i);
    f << join_csv(row) << '\n';
  }
}

Grid2 read_grid_csv(const std::filesystem::path& path, GridKind kind) {
  auto f = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(parse_csv_line(line, path.string()));
    if (rows.back().size() != rows.front().size()) {
      throw Error(ErrorCode::IoError, path.string() + ": ragged rows in grid CSV");
    }
  }
  if (rows.empty()) throw Error(ErrorCode::IoError, path.string() + ": empty grid CSV");
  Grid2 g(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()), kind);
  for (int j = 0; j < g.n_rows; ++j) {
    for (int i = 0; i < g.n_cols; ++i) {
      g.at(j, i) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
  }
  return g;
}

void write_trace_csv(const SurfaceTrace& t, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << join_csv(t.x) << '\n';
}

SurfaceTrace read_trace_csv(const std::filesystem::path& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) {
    throw Error(ErrorCode::IoError, path.string() + ": empty trace CSV");
  }
  return SurfaceTrace(parse_csv_line(line, path.string()));
}

void write_gauss_csv(const GaussianField& gf, const std::filesystem::path& path,
                     const std::vector<int>* fallback_flags) {
  auto f = open_out(path);
  f << join_csv(gf.gamma) << '\n';
  f << join_csv(gf.sigma) << '\n';
  if (fallback_flags) {
    std::string line;
    for (std::size_t i = 0; i < fallback_flags->size(); ++i) {
      if (i) line += ',';
      line += (*fallback_flags)[i] ? '1' : '0';
    }
    f << line << '\n';
  }
}

GaussianField read_gauss_csv(const std::filesystem::path& path) {
  auto f = open_in(path);
  std::string line;
  GaussianField gf;
  if (!std::getline(f, line)) {
    throw Error(ErrorCode::IoError, path.string() + ": missing mean line");
  }
  gf.gamma = parse_csv_line(line, path.string());
  if (!std::getline(f, line)) {
    throw Error(ErrorCode::IoError, path.string() + ": missing sigma line");
  }
  gf.sigma = parse_csv_line(line, path.string());
  if (gf.gamma.size() != gf.sigma.size()) {
    throw Error(ErrorCode::IoError, path.string() + ": mean/sigma length mismatch");
  }
  return gf;
}

}  // namespace surfseg
