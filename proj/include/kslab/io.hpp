#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kslab/grid.hpp"

namespace kslab {

/// Shortest round-trippable decimal form of a double ("%.17g"), used for all
/// CSV payloads so that replays are byte-identical.
std::string format_double(double v);

/// One comment line "# key=value | key=value | ..." recording the run.
std::string comment_header(const std::vector<std::pair<std::string, std::string>>& params);

struct CsvData {
  std::vector<std::string> comments;  ///< '#' lines, without the marker
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// CSV with an optional '#' comment line, a header row, and numeric rows.
void write_csv(const std::string& path, const std::string& comment,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

CsvData read_csv(const std::string& path);

/// Two-column `r,u` solution files.
void write_solution_csv(const std::string& path, const std::string& comment,
                        const RadialGrid& grid, const Field& u);
std::pair<Field, Field> read_solution_csv(const std::string& path);  // (r, u)

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};

struct SvgOptions {
  std::string title, xlabel, ylabel;
  bool log_y = false;
  std::vector<double> vertical_lines;  ///< x positions (crossings, thresholds)
  std::vector<std::size_t> marks;      ///< sample indices to circle (folds)
  std::string annotation;              ///< parameter line under the title
};

/// Static SVG line plot; series are polylines with automatic axes and ticks.
void svg_line_plot(const std::string& path, const std::vector<SvgSeries>& series,
                   const SvgOptions& opts);

}  // namespace kslab
