// plot.hpp
// Static SVG line charts from sweep CSV files.

#pragma once

#include <cmath>
#include <istream>
#include <sstream>

#include "lpow/sweep.hpp"

namespace lpow {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  }
};

inline CsvTable parse_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw parameter_error("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line, ',');
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.header.size()) {
      throw parameter_error("csv: line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                            " cells, header has " + std::to_string(t.header.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      if (c == "nan") {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        row.push_back(parse_double(c, "csv cell"));
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline CsvTable load_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot read '" + path + "'");
  return parse_csv(is);
}

struct PlotSpec {
  std::vector<std::string> columns;
  std::vector<double> bounds;  // horizontal reference lines
  std::string title;
  double width = 720;
  double height = 480;
};

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Fixed-point label with up to 3 decimals, trailing zeros removed.
inline std::string tick_label(double v) {
  if (std::abs(v) < 5e-4) return "0";
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 3);
  std::string s(buf.data(), ec == std::errc{} ? end : buf.data());
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

inline std::string coord(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
  return {buf.data(), ec == std::errc{} ? end : buf.data()};
}

inline constexpr std::array<std::string_view, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace detail

/// Renders the chart; the first CSV column is the x axis.
inline std::string render_svg(const CsvTable& table, const PlotSpec& spec) {
  if (spec.columns.empty()) throw parameter_error("plot: no columns requested");
  if (table.header.empty() || table.rows.empty()) throw parameter_error("plot: csv has no data rows");
  std::vector<std::size_t> cols;
  for (const auto& c : spec.columns) {
    const auto idx = table.column(c);
    if (!idx || *idx == 0) throw parameter_error("plot: csv has no column '" + c + "'");
    cols.push_back(*idx);
  }

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& r : table.rows) {
    if (std::isfinite(r[0])) {
      xmin = std::min(xmin, r[0]);
      xmax = std::max(xmax, r[0]);
    }
    for (auto c : cols)
      if (std::isfinite(r[c])) {
        ymin = std::min(ymin, r[c]);
        ymax = std::max(ymax, r[c]);
      }
  }
  for (double b : spec.bounds) {
    ymin = std::min(ymin, b);
    ymax = std::max(ymax, b);
  }
  if (!std::isfinite(xmin)) throw parameter_error("plot: x column has no finite values");
  if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
  if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double left = 70, right = 160, top = 40, bottom = 60;
  const double pw = spec.width - left - right, ph = spec.height - top - bottom;
  const auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  const auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };
  using detail::coord;

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << coord(spec.width) << "\" height=\""
    << coord(spec.height) << "\" viewBox=\"0 0 " << coord(spec.width) << ' ' << coord(spec.height)
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    o << "<text x=\"" << coord(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << detail::xml_escape(spec.title) << "</text>\n";
  }

  o << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  o << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top + ph) << "\" x2=\"" << coord(left + pw) << "\" y2=\""
    << coord(top + ph) << "\"/>\n";
  o << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top) << "\" x2=\"" << coord(left) << "\" y2=\""
    << coord(top + ph) << "\"/>\n";
  o << "</g>\n<g class=\"ticks\" font-size=\"10\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    o << "<line x1=\"" << coord(sx(xv)) << "\" y1=\"" << coord(top + ph) << "\" x2=\"" << coord(sx(xv))
      << "\" y2=\"" << coord(top + ph + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << coord(sx(xv)) << "\" y=\"" << coord(top + ph + 18) << "\" text-anchor=\"middle\">"
      << detail::tick_label(xv) << "</text>\n";
    o << "<line x1=\"" << coord(left - 5) << "\" y1=\"" << coord(sy(yv)) << "\" x2=\"" << coord(left)
      << "\" y2=\"" << coord(sy(yv)) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << coord(left - 8) << "\" y=\"" << coord(sy(yv) + 3) << "\" text-anchor=\"end\">"
      << detail::tick_label(yv) << "</text>\n";
  }
  o << "</g>\n";
  o << "<text class=\"xlabel\" x=\"" << coord(left + pw / 2) << "\" y=\"" << coord(spec.height - 15)
    << "\" text-anchor=\"middle\">" << detail::xml_escape(table.header[0]) << "</text>\n";
  o << "<text class=\"ylabel\" x=\"18\" y=\"" << coord(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << coord(top + ph / 2) << ")\">value</text>\n";

  for (double b : spec.bounds) {
    o << "<line class=\"bound\" data-value=\"" << format_double(b) << "\" x1=\"" << coord(left) << "\" y1=\""
      << coord(sy(b)) << "\" x2=\"" << coord(left + pw) << "\" y2=\"" << coord(sy(b))
      << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
  }

  for (std::size_t k = 0; k < cols.size(); ++k) {
    const auto color = detail::kPalette[k % detail::kPalette.size()];
    o << "<polyline class=\"series\" data-column=\"" << detail::xml_escape(spec.columns[k])
      << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& r : table.rows) {
      if (!std::isfinite(r[0]) || !std::isfinite(r[cols[k]])) continue;
      o << (first ? "" : " ") << coord(sx(r[0])) << ',' << coord(sy(r[cols[k]]));
      first = false;
    }
    o << "\"/>\n";
  }

  o << "<g class=\"legend\">\n";
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const double y = top + 10 + 20.0 * static_cast<double>(k);
    const auto color = detail::kPalette[k % detail::kPalette.size()];
    o << "<line x1=\"" << coord(left + pw + 15) << "\" y1=\"" << coord(y) << "\" x2=\"" << coord(left + pw + 40)
      << "\" y2=\"" << coord(y) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << coord(left + pw + 46) << "\" y=\"" << coord(y + 4) << "\">"
      << detail::xml_escape(spec.columns[k]) << "</text>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

}  // namespace lpow
