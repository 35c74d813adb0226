#pragma once

// Output helpers: RFC-4180 CSV with round-trippable floats, JSON provenance
// sidecars and a small SVG line-plot writer.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tailscope/error.hpp"

namespace tailscope::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

/// %.17g, with nan/inf spelled as JSON-friendly words.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

using Cell = std::variant<double, long long, std::string>;

/// Column-typed table that prints as CSV (CRLF line ends, header row first).
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    detail::require(!header_.empty(), "CSV table needs at least one column");
  }

  void add_row(std::vector<Cell> row) {
    detail::require(row.size() == header_.size(), "CSV row width does not match the header");
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }

  void write(std::ostream& out) const {
    write_line(out, header_);
    for (const auto& row : rows_) {
      std::vector<std::string> cells;
      cells.reserve(row.size());
      for (const auto& c : row) cells.push_back(render(c));
      write_line(out, cells);
    }
  }

  std::string str() const {
    std::ostringstream ss;
    write(ss);
    return ss.str();
  }

 private:
  static std::string render(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);  // escaped once, in write_line
  }

  static void write_line(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(cells[i]);
    }
    out << "\r\n";
  }

  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

/// Splits one RFC-4180 record (no embedded newlines).
inline std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  detail::require(!quoted, "unterminated quote in CSV line");
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw domain_error("not a number: `" + s + "`");
  return v;
}

/// Header plus string cells of a whole CSV stream.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw domain_error("CSV has no column `" + name + "`");
    return static_cast<std::size_t>(it - header.begin());
  }
};

inline CsvData read_csv(std::istream& in) {
  CsvData d;
  std::string line;
  if (!std::getline(in, line)) throw domain_error("CSV input is empty");
  d.header = parse_csv_line(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = parse_csv_line(line);
    if (cells.size() != d.header.size()) throw domain_error("CSV row width does not match the header");
    d.rows.push_back(std::move(cells));
  }
  return d;
}

/// JSON number, or a string for non-finite values (JSON has no nan/inf).
inline json number(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

inline json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write to " + path.string() + " failed");
}

/// Pretty JSON with a trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// `<path>.provenance.json` next to an artifact.
inline std::filesystem::path sidecar_path(const std::filesystem::path& artifact) {
  return artifact.string() + ".provenance.json";
}

// ---- SVG -------------------------------------------------------------------

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Polylines over shared axes with min/max tick labels. Non-finite points break the line.
inline std::string svg_plot(const std::vector<Series>& series, const std::string& title, const std::string& xlabel,
                            const std::string& ylabel, bool log_y = false) {
  const double W = 640, H = 420, left = 70, right = 20, top = 40, bottom = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto ty = [&](double y) { return log_y ? (y > 0 ? std::log10(y) : std::nan("")) : y; };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double y = ty(s.y[i]);
      if (!std::isfinite(s.x[i]) || !std::isfinite(y)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!(x0 < x1)) x0 -= 0.5, x1 += 0.5;
  if (!(y0 < y1)) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (W - left - right); };
  auto py = [&](double y) { return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom); };
  auto esc = [](std::string s) {
    std::string o;
    for (char c : s) {
      if (c == '<') o += "&lt;";
      else if (c == '>') o += "&gt;";
      else if (c == '&') o += "&amp;";
      else o += c;
    }
    return o;
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << esc(title) << "</text>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
    << "\" stroke=\"black\"/>\n";
  auto label = [&](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", v);
    return std::string(b);
  };
  const std::string ypre = log_y ? "1e" : "";
  o << "<text x=\"" << left << "\" y=\"" << H - bottom + 16 << "\" font-size=\"11\" text-anchor=\"middle\">"
    << label(x0) << "</text>\n";
  o << "<text x=\"" << W - right << "\" y=\"" << H - bottom + 16 << "\" font-size=\"11\" text-anchor=\"middle\">"
    << label(x1) << "</text>\n";
  o << "<text x=\"" << left - 4 << "\" y=\"" << H - bottom << "\" font-size=\"11\" text-anchor=\"end\">" << ypre
    << label(y0) << "</text>\n";
  o << "<text x=\"" << left - 4 << "\" y=\"" << top + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << ypre
    << label(y1) << "</text>\n";
  o << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 12 << "\" font-size=\"12\" text-anchor=\"middle\">"
    << esc(xlabel) << "</text>\n";
  o << "<text x=\"16\" y=\"" << (top + H - bottom) / 2 << "\" font-size=\"12\" text-anchor=\"middle\" "
    << "transform=\"rotate(-90 16 " << (top + H - bottom) / 2 << ")\">" << esc(ylabel) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % 6];
    std::string pts;
    auto flush = [&] {
      if (!pts.empty()) {
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
        pts.clear();
      }
    };
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double y = ty(s.y[i]);
      if (!std::isfinite(s.x[i]) || !std::isfinite(y)) {
        flush();
        continue;
      }
      char b[64];
      std::snprintf(b, sizeof b, "%.2f,%.2f ", px(s.x[i]), py(y));
      pts += b;
    }
    flush();
    o << "<text x=\"" << W - right - 4 << "\" y=\"" << top + 14 * (k + 1) << "\" font-size=\"11\" text-anchor=\"end\" "
      << "fill=\"" << color << "\">" << esc(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace tailscope::io
