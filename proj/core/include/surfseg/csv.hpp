#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "surfseg/grid.hpp"

namespace surfseg {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);
double parse_double(const std::string& field, const std::string& context);

/// Grid2 CSV: one text line per row, comma-separated, no header.
void write_grid_csv(const Grid2& g, const std::filesystem::path& path);
Grid2 read_grid_csv(const std::filesystem::path& path, GridKind kind);

/// SurfaceTrace CSV: a single line of comma-separated positions.
void write_trace_csv(const SurfaceTrace& t, const std::filesystem::path& path);
SurfaceTrace read_trace_csv(const std::filesystem::path& path);

/// Gaussian field CSV: line 1 = means, line 2 = standard deviations,
/// optional line 3 = 0/1 fallback flags.
void write_gauss_csv(const GaussianField& gf, const std::filesystem::path& path,
                     const std::vector<int>* fallback_flags = nullptr);
GaussianField read_gauss_csv(const std::filesystem::path& path);

std::vector<double> parse_csv_line(const std::string& line, const std::string& context);
std::string join_csv(const std::vector<double>& values);

}  // namespace surfseg
