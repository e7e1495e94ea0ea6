#pragma once

// Number formatting, CSV reading/writing and minimal SVG rendering.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "actlib/error.hpp"

namespace actlib::io {

/// Shortest decimal that parses back to the same double.
inline std::string shortest(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

/// Twelve significant digits, trailing zeros kept.
inline std::string sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.12g", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw Error("csv: no column named '" + std::string(name) + "'");
  }
};

inline std::string to_csv(const Table& t) {
  std::string s;
  for (std::size_t i = 0; i < t.header.size(); ++i) s += (i ? "," : "") + t.header[i];
  s += '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) s += ',';
      s += shortest(r[i]);
    }
    s += '\n';
  }
  return s;
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw Error("write to '" + path + "' failed");
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = line.find(',', start);
    out.push_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) return out;
    start = p + 1;
  }
}

/// Numeric CSV with a header row.
inline Table parse_csv(std::string_view text) {
  Table t;
  std::size_t pos = 0, lineno = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (t.header.empty()) {
      for (auto f : fields) t.header.emplace_back(f);
      continue;
    }
    if (fields.size() != t.header.size())
      throw Error("csv line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) + " fields");
    std::vector<double> row;
    for (auto f : fields) {
      double v = 0;
      auto r = std::from_chars(f.data(), f.data() + f.size(), v);
      if (r.ec != std::errc() || r.ptr != f.data() + f.size())
        throw Error("csv line " + std::to_string(lineno) + ": '" + std::string(f) + "' is not a number");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw Error("csv: empty input");
  return t;
}

// ---------------------------------------------------------------------------
// SVG

namespace detail {

inline constexpr double svg_w = 640, svg_h = 400, margin = 50;

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::pair<double, double> extent(const std::vector<double>& v) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double x : v)
    if (std::isfinite(x)) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  if (!(lo <= hi)) return {0, 1};
  if (lo == hi) return {lo - 0.5, hi + 0.5};
  return {lo, hi};
}

inline std::string frame(double xlo, double xhi, double ylo, double yhi, const std::string& xlabel) {
  std::string s;
  s += "<rect x=\"" + num(margin) + "\" y=\"" + num(margin) + "\" width=\"" + num(svg_w - 2 * margin) +
       "\" height=\"" + num(svg_h - 2 * margin) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  auto text = [&](double x, double y, const std::string& t, const char* anchor) {
    s += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"11\" text-anchor=\"" + anchor + "\">" + t +
         "</text>\n";
  };
  text(margin, svg_h - margin + 15, label(xlo), "start");
  text(svg_w - margin, svg_h - margin + 15, label(xhi), "end");
  text(margin - 4, svg_h - margin, label(ylo), "end");
  text(margin - 4, margin + 10, label(yhi), "end");
  text(svg_w / 2, svg_h - 12, xlabel, "middle");
  return s;
}

}  // namespace detail

/// One polyline per column after `xcol`.
inline std::string line_plot(const Table& t, std::size_t xcol, const std::vector<std::size_t>& ycols) {
  using namespace detail;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  std::vector<double> xs, ys;
  for (const auto& r : t.rows) {
    xs.push_back(r[xcol]);
    for (auto c : ycols) ys.push_back(r[c]);
  }
  const auto [xlo, xhi] = extent(xs);
  const auto [ylo, yhi] = extent(ys);
  auto px = [&](double x) { return margin + (x - xlo) / (xhi - xlo) * (svg_w - 2 * margin); };
  auto py = [&](double y) { return svg_h - margin - (y - ylo) / (yhi - ylo) * (svg_h - 2 * margin); };
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(svg_w) + "\" height=\"" + num(svg_h) + "\">\n";
  s += frame(xlo, xhi, ylo, yhi, t.header[xcol]);
  for (std::size_t k = 0; k < ycols.size(); ++k) {
    const char* col = colors[k % 8];
    s += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : t.rows)
      if (std::isfinite(r[xcol]) && std::isfinite(r[ycols[k]])) s += num(px(r[xcol])) + "," + num(py(r[ycols[k]])) + " ";
    s += "\"/>\n";
    s += "<text x=\"" + num(svg_w - margin + 4) + "\" y=\"" + num(margin + 14.0 * static_cast<double>(k) + 10) +
         "\" font-size=\"11\" fill=\"" + col + "\">" + t.header[ycols[k]] + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

/// Heat map of (x, y, value) rows; cells are drawn at their own coordinates.
inline std::string heat_plot(const Table& t, std::size_t xc, std::size_t yc, std::size_t vc) {
  using namespace detail;
  std::vector<double> xs, ys, vs;
  for (const auto& r : t.rows) {
    xs.push_back(r[xc]);
    ys.push_back(r[yc]);
    vs.push_back(r[vc]);
  }
  const auto [xlo, xhi] = extent(xs);
  const auto [ylo, yhi] = extent(ys);
  const auto [vlo, vhi] = extent(vs);
  std::vector<double> ux = xs, uy = ys;
  std::sort(ux.begin(), ux.end());
  ux.erase(std::unique(ux.begin(), ux.end()), ux.end());
  std::sort(uy.begin(), uy.end());
  uy.erase(std::unique(uy.begin(), uy.end()), uy.end());
  const double cw = (svg_w - 2 * margin) / static_cast<double>(std::max<std::size_t>(ux.size(), 1));
  const double ch = (svg_h - 2 * margin) / static_cast<double>(std::max<std::size_t>(uy.size(), 1));
  auto px = [&](double x) { return margin + (x - xlo) / (xhi - xlo) * (svg_w - 2 * margin - cw); };
  auto py = [&](double y) { return svg_h - margin - ch - (y - ylo) / (yhi - ylo) * (svg_h - 2 * margin - ch); };
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(svg_w) + "\" height=\"" + num(svg_h) +
                  "\" shape-rendering=\"crispEdges\">\n";
  for (const auto& r : t.rows) {
    const double f = std::isfinite(r[vc]) ? (r[vc] - vlo) / (vhi - vlo) : 0.0;
    const int red = static_cast<int>(std::lround(255 * f)), blue = 255 - red;
    char fill[16];
    std::snprintf(fill, sizeof fill, "#%02x40%02x", red, blue);
    s += "<rect x=\"" + num(px(r[xc])) + "\" y=\"" + num(py(r[yc])) + "\" width=\"" + num(cw + 0.05) +
         "\" height=\"" + num(ch + 0.05) + "\" fill=\"" + fill + "\"/>\n";
  }
  s += frame(xlo, xhi, ylo, yhi, t.header[xc] + " / " + t.header[yc] + " -> " + t.header[vc]);
  s += "</svg>\n";
  return s;
}

}  // namespace actlib::io
