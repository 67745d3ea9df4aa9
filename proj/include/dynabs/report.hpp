#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dynabs/geometry.hpp"
#include "dynabs/pipes.hpp"

namespace dynabs {

// Shortest text that reads back to the same double.
std::string format_double(double v);
std::string format_point(const Point& p, char sep = ',');

// Columns t_lo, t_hi, lo_1..lo_n, hi_1..hi_n; one row per segment.
void write_pipe_csv(std::ostream& os, const Pipe& p);
Pipe read_pipe_csv(std::istream& is);

// Columns index, lo_1..lo_n, hi_1..hi_n.
void write_boxes_csv(std::ostream& os, const std::vector<Box>& boxes);
// Columns index_1..index_n, lo_1..lo_n, hi_1..hi_n.
void write_cells_csv(std::ostream& os, const GridSet& cells);

// Plot of the first two coordinates.
class SvgPlot {
 public:
  void add_box(const Box& b, const std::string& fill, double opacity = 0.35);
  void add_path(const std::vector<Point>& points, const std::string& stroke);
  void set_title(std::string title) { title_ = std::move(title); }
  std::size_t box_count() const { return boxes_.size(); }
  void write(std::ostream& os, int width = 640, int height = 640) const;

 private:
  struct Rect {
    Box box;
    std::string fill;
    double opacity;
  };
  struct Path {
    std::vector<Point> points;
    std::string stroke;
  };
  std::vector<Rect> boxes_;
  std::vector<Path> paths_;
  std::string title_;
};

// One run as a single line of key=value fields, values quoted when needed.
class RunRecord {
 public:
  explicit RunRecord(std::string command);
  RunRecord& set(const std::string& key, const std::string& value);
  RunRecord& set(const std::string& key, double value);
  RunRecord& set(const std::string& key, long long value);
  const std::vector<std::pair<std::string, std::string>>& fields() const { return fields_; }
  std::string line() const;
  // Appends line() and a newline to `path`.
  void append_to(const std::string& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

// Inverse of RunRecord::line().
std::vector<std::pair<std::string, std::string>> parse_record(const std::string& line);

}  // namespace dynabs
