#pragma once

#include <string>
#include <vector>

#include "capsym/report.hpp"

namespace capsym {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const;
};

// 17 significant digits in scientific notation; strtod reads them back exactly.
std::string format_double(double v);
std::string to_csv(const CsvTable& t);
CsvTable parse_csv(const std::string& text);
void write_csv(const std::string& path, const CsvTable& t);
CsvTable read_csv(const std::string& path);

// Appends one JSON object per line.
void append_jsonl(const std::string& path, const std::vector<VerificationReport>& reports);
std::vector<VerificationReport> read_jsonl(const std::string& path);

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
  bool markers = false;
};

struct SvgPlot {
  std::string title;
  std::string x_label, y_label;
  std::string annotation;  // parameter line under the title
  bool log_x = false, log_y = false;
  std::vector<SvgSeries> series;
};

// Standalone 800x600 SVG line chart.
std::string render_svg(const SvgPlot& plot);
void write_text(const std::string& path, const std::string& text);

}  // namespace capsym
