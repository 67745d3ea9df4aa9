#include "dynabs/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dynabs {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

std::string format_point(const Point& p, char sep) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += sep;
    s += format_double(p[i]);
  }
  return s;
}

namespace {

void write_bounds_header(std::ostream& os, std::size_t n) {
  for (std::size_t i = 1; i <= n; ++i) os << ",lo_" << i;
  for (std::size_t i = 1; i <= n; ++i) os << ",hi_" << i;
  os << '\n';
}

void write_bounds(std::ostream& os, const Box& b) {
  for (double v : b.lo()) os << ',' << format_double(v);
  for (double v : b.hi()) os << ',' << format_double(v);
  os << '\n';
}

std::vector<double> split_numbers(const std::string& line, std::size_t lineno) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    const char* first = line.data() + pos;
    const char* last = line.data() + comma;
    while (first < last && *first == ' ') ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
      throw std::runtime_error("pipe csv line " + std::to_string(lineno) + ": bad number");
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

bool needs_quotes(const std::string& v) {
  return v.empty() || v.find_first_of(" \t\n\"=\\") != std::string::npos;
}

}  // namespace

void write_pipe_csv(std::ostream& os, const Pipe& p) {
  os << "t_lo,t_hi";
  write_bounds_header(os, p.dim());
  for (std::size_t i = 0; i < p.len(); ++i) {
    os << format_double(p.t_begin(i)) << ',' << format_double(p.t_end(i));
    write_bounds(os, p.box(i));
  }
}

Pipe read_pipe_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("t_lo,t_hi", 0) != 0)
    throw std::runtime_error("pipe csv: missing header");
  std::vector<Box> boxes;
  std::vector<double> ends;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<double> v = split_numbers(line, lineno);
    if (v.size() < 4 || v.size() % 2 != 0)
      throw std::runtime_error("pipe csv line " + std::to_string(lineno) + ": wrong column count");
    const std::size_t n = (v.size() - 2) / 2;
    boxes.emplace_back(Point(v.begin() + 2, v.begin() + 2 + n), Point(v.begin() + 2 + n, v.end()));
    ends.push_back(v[1]);
  }
  return Pipe(std::move(boxes), std::move(ends));
}

void write_boxes_csv(std::ostream& os, const std::vector<Box>& boxes) {
  os << "index";
  write_bounds_header(os, boxes.empty() ? 0 : boxes.front().dim());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    os << i;
    write_bounds(os, boxes[i]);
  }
}

void write_cells_csv(std::ostream& os, const GridSet& cells) {
  const std::size_t n = cells.dim();
  for (std::size_t i = 1; i <= n; ++i) os << (i > 1 ? "," : "") << "index_" << i;
  write_bounds_header(os, n);
  for (const auto& idx : cells.cells()) {
    for (std::size_t i = 0; i < n; ++i) os << (i ? "," : "") << idx[i];
    write_bounds(os, cells.cell_box(idx));
  }
}

// ---------------------------------------------------------------------------

void SvgPlot::add_box(const Box& b, const std::string& fill, double opacity) {
  if (b.dim() < 2) throw std::invalid_argument("svg: boxes need at least two dimensions");
  boxes_.push_back({b, fill, opacity});
}

void SvgPlot::add_path(const std::vector<Point>& points, const std::string& stroke) {
  for (const auto& p : points)
    if (p.size() < 2) throw std::invalid_argument("svg: points need at least two dimensions");
  paths_.push_back({points, stroke});
}

void SvgPlot::write(std::ostream& os, int width, int height) const {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto grow = [&](double x, double y) {
    x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
  };
  for (const auto& r : boxes_) grow(r.box.lo(0), r.box.lo(1)), grow(r.box.hi(0), r.box.hi(1));
  for (const auto& p : paths_)
    for (const auto& q : p.points) grow(q[0], q[1]);
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  double padx = std::max(1e-9, 0.05 * (x1 - x0)), pady = std::max(1e-9, 0.05 * (y1 - y0));
  x0 -= padx, x1 += padx, y0 -= pady, y1 += pady;
  const double margin = 40.0;
  const double sx = (width - 2 * margin) / (x1 - x0);
  const double sy = (height - 2 * margin) / (y1 - y0);
  auto px = [&](double x) { return margin + (x - x0) * sx; };
  auto py = [&](double y) { return height - margin - (y - y0) * sy; };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  if (!title_.empty())
    os << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << xml_escape(title_)
       << "</text>\n";
  os << "<g class=\"boxes\" stroke=\"none\">\n";
  for (const auto& r : boxes_) {
    os << "<rect x=\"" << px(r.box.lo(0)) << "\" y=\"" << py(r.box.hi(1)) << "\" width=\""
       << std::max(0.5, (r.box.hi(0) - r.box.lo(0)) * sx) << "\" height=\""
       << std::max(0.5, (r.box.hi(1) - r.box.lo(1)) * sy) << "\" fill=\"" << xml_escape(r.fill)
       << "\" fill-opacity=\"" << r.opacity << "\"/>\n";
  }
  os << "</g>\n<g class=\"paths\" fill=\"none\" stroke-width=\"1\">\n";
  for (const auto& p : paths_) {
    os << "<polyline stroke=\"" << xml_escape(p.stroke) << "\" points=\"";
    for (std::size_t i = 0; i < p.points.size(); ++i)
      os << (i ? " " : "") << px(p.points[i][0]) << ',' << py(p.points[i][1]);
    os << "\"/>\n";
  }
  os << "</g>\n"
     << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin << "\" height=\""
     << height - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n"
     << "<text x=\"" << margin << "\" y=\"" << height - 12 << "\" font-family=\"sans-serif\" font-size=\"11\">x1 ["
     << format_double(x0) << ", " << format_double(x1) << "]  x2 [" << format_double(y0) << ", "
     << format_double(y1) << "]</text>\n"
     << "</svg>\n";
}

// ---------------------------------------------------------------------------

RunRecord::RunRecord(std::string command) { fields_.emplace_back("command", std::move(command)); }

RunRecord& RunRecord::set(const std::string& key, const std::string& value) {
  for (auto& f : fields_)
    if (f.first == key) {
      f.second = value;
      return *this;
    }
  fields_.emplace_back(key, value);
  return *this;
}

RunRecord& RunRecord::set(const std::string& key, double value) { return set(key, format_double(value)); }

RunRecord& RunRecord::set(const std::string& key, long long value) { return set(key, std::to_string(value)); }

std::string RunRecord::line() const {
  std::string out;
  for (const auto& [k, v] : fields_) {
    if (!out.empty()) out += ' ';
    out += k;
    out += '=';
    if (!needs_quotes(v)) {
      out += v;
      continue;
    }
    out += '"';
    for (char c : v) {
      if (c == '"' || c == '\\') out += '\\';
      if (c == '\n') {
        out += "\\n";
        continue;
      }
      out += c;
    }
    out += '"';
  }
  return out;
}

void RunRecord::append_to(const std::string& path) const {
  std::ofstream f(path, std::ios::app);
  if (!f) throw std::runtime_error("cannot open log file " + path);
  f << line() << '\n';
}

std::vector<std::pair<std::string, std::string>> parse_record(const std::string& line) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size()) break;
    std::size_t eq = line.find('=', i);
    if (eq == std::string::npos) throw std::runtime_error("record: missing '='");
    std::string key = line.substr(i, eq - i);
    i = eq + 1;
    std::string value;
    if (i < line.size() && line[i] == '"') {
      ++i;
      while (i < line.size() && line[i] != '"') {
        if (line[i] == '\\' && i + 1 < line.size()) {
          ++i;
          value += line[i] == 'n' ? '\n' : line[i];
        } else {
          value += line[i];
        }
        ++i;
      }
      if (i >= line.size()) throw std::runtime_error("record: unterminated quote");
      ++i;
    } else {
      std::size_t sp = line.find(' ', i);
      if (sp == std::string::npos) sp = line.size();
      value = line.substr(i, sp - i);
      i = sp;
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

}  // namespace dynabs
