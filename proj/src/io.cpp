#include "kslab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "kslab/errors.hpp"

namespace kslab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string comment_header(const std::vector<std::pair<std::string, std::string>>& params) {
  std::string line = "#";
  for (const auto& [k, v] : params) line += " " + k + "=" + v + " |";
  if (!params.empty()) line.pop_back();
  return line;
}

void write_csv(const std::string& path, const std::string& comment,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot open for writing: " + path);
  if (!comment.empty()) out << comment << "\n";
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << "\n";
  }
}

CsvData read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open: " + path);
  CsvData data;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      data.comments.push_back(line.substr(1));
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    if (!header_seen) {
      while (std::getline(ss, cell, ',')) data.columns.push_back(cell);
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    data.rows.push_back(std::move(row));
  }
  return data;
}

void write_solution_csv(const std::string& path, const std::string& comment,
                        const RadialGrid& grid, const Field& u) {
  std::vector<std::vector<double>> rows(grid.n());
  for (std::size_t i = 0; i < grid.n(); ++i) rows[i] = {grid.r[i], u[i]};
  write_csv(path, comment, {"r", "u"}, rows);
}

std::pair<Field, Field> read_solution_csv(const std::string& path) {
  const CsvData data = read_csv(path);
  if (data.columns.size() != 2 || data.columns[0] != "r" || data.columns[1] != "u")
    throw config_error("not a solution csv (expected header r,u): " + path);
  Field r, u;
  for (const auto& row : data.rows) {
    if (row.size() != 2) throw config_error("malformed solution row in " + path);
    r.push_back(row[0]);
    u.push_back(row[1]);
  }
  return {r, u};
}

namespace {

struct AxisMap {
  double lo = 0.0, hi = 1.0;
  double px0 = 0.0, px1 = 1.0;
  double operator()(double v) const {
    if (hi == lo) return 0.5 * (px0 + px1);
    return px0 + (v - lo) / (hi - lo) * (px1 - px0);
  }
};

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  std::vector<double> ticks;
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  const double start = std::ceil(lo / step) * step;
  for (double v = start; v <= hi + 0.5 * step; v += step) ticks.push_back(v);
  return ticks;
}

}  // namespace

void svg_line_plot(const std::string& path, const std::vector<SvgSeries>& series,
                   const SvgOptions& opts) {
  if (series.empty()) throw config_error("svg_line_plot: no series");
  for (const SvgSeries& s : series)
    if (s.x.empty() || s.x.size() != s.y.size())
      throw config_error("svg_line_plot: empty or mismatched series");

  auto ty = [&](double v) { return opts.log_y ? std::log10(std::max(v, 1e-300)) : v; };

  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const SvgSeries& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      const double yv = ty(s.y[i]);
      ylo = std::min(ylo, yv);
      yhi = std::max(yhi, yv);
    }
  if (xhi == xlo) xhi = xlo + 1.0;
  if (yhi == ylo) yhi = ylo + 1.0;
  const double ypad = 0.05 * (yhi - ylo);
  ylo -= ypad;
  yhi += ypad;

  const double W = 760, H = 520, ml = 80, mr = 30, mt = 50, mb = 60;
  const AxisMap X{xlo, xhi, ml, W - mr};
  const AxisMap Y{ylo, yhi, H - mb, mt};  // flipped

  std::ofstream out(path);
  if (!out) throw config_error("cannot open for writing: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << opts.title << "</text>\n";
  if (!opts.annotation.empty())
    out << "<text x=\"" << W / 2 << "\" y=\"42\" text-anchor=\"middle\" font-size=\"11\" "
        << "fill=\"#555\">" << opts.annotation << "</text>\n";

  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
      << H - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
      << "\" stroke=\"black\"/>\n";
  for (double tx : nice_ticks(xlo, xhi)) {
    const double px = X(tx);
    out << "<line x1=\"" << px << "\" y1=\"" << H - mb << "\" x2=\"" << px << "\" y2=\""
        << H - mb + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px << "\" y=\"" << H - mb + 18
        << "\" text-anchor=\"middle\" font-size=\"10\">" << format_double(tx).substr(0, 8)
        << "</text>\n";
  }
  for (double tv : nice_ticks(ylo, yhi)) {
    const double py = Y(tv);
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py << "\" x2=\"" << ml << "\" y2=\"" << py
        << "\" stroke=\"black\"/>\n";
    std::string label = format_double(tv).substr(0, 8);
    if (opts.log_y) label = "1e" + label;
    out << "<text x=\"" << ml - 8 << "\" y=\"" << py + 3
        << "\" text-anchor=\"end\" font-size=\"10\">" << label << "</text>\n";
  }
  out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\" font-size=\"12\">" << opts.xlabel << "</text>\n";
  out << "<text x=\"18\" y=\"" << (mt + H - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 18 "
      << (mt + H - mb) / 2 << ")\">" << opts.ylabel << "</text>\n";

  for (double vx : opts.vertical_lines) {
    const double px = X(vx);
    out << "<line x1=\"" << px << "\" y1=\"" << mt << "\" x2=\"" << px << "\" y2=\"" << H - mb
        << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  for (std::size_t si = 0; si < series.size(); ++si) {
    const SvgSeries& s = series[si];
    out << "<polyline fill=\"none\" stroke=\"" << colors[si % 5] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << X(s.x[i]) << "," << Y(ty(s.y[i])) << " ";
    out << "\"/>\n";
    if (!s.label.empty())
      out << "<text x=\"" << W - mr - 5 << "\" y=\"" << mt + 16 * (si + 1)
          << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << colors[si % 5] << "\">"
          << s.label << "</text>\n";
  }
  if (!opts.marks.empty()) {
    const SvgSeries& s = series.front();
    for (std::size_t idx : opts.marks)
      if (idx < s.x.size())
        out << "<circle cx=\"" << X(s.x[idx]) << "\" cy=\"" << Y(ty(s.y[idx]))
            << "\" r=\"5\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace kslab
