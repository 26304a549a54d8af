#include "capsym/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "capsym/core.hpp"

namespace capsym {

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InvalidInput(fmt::format("CSV has no column '{}'", name));
  const std::size_t k = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[k]);
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.16e}", v);
}

std::string to_csv(const CsvTable& t) {
  if (t.header.empty()) throw InvalidInput("CSV header is mandatory");
  std::string s;
  for (std::size_t i = 0; i < t.header.size(); ++i) s += (i ? "," : "") + t.header[i];
  s += '\n';
  for (const auto& r : t.rows) {
    if (r.size() != t.header.size()) throw InvalidInput("CSV row width does not match header");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) s += ',';
      s += format_double(r[i]);
    }
    s += '\n';
  }
  return s;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size())
      throw InvalidInput(fmt::format("CSV line {}: expected {} fields, got {}", lineno, t.header.size(), cells.size()));
    std::vector<double> row;
    for (const auto& c : cells) {
      errno = 0;
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0') throw InvalidInput(fmt::format("CSV line {}: bad number '{}'", lineno, c));
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw InvalidInput("CSV header is mandatory");
  return t;
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  f << text;
  if (!f) throw std::runtime_error(fmt::format("write failed for '{}'", path));
}

namespace {

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidInput(fmt::format("cannot open '{}'", path));
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

void write_csv(const std::string& path, const CsvTable& t) { write_text(path, to_csv(t)); }

CsvTable read_csv(const std::string& path) { return parse_csv(read_text(path)); }

void append_jsonl(const std::string& path, const std::vector<VerificationReport>& reports) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::app);
  if (!f) throw std::runtime_error(fmt::format("cannot append to '{}'", path));
  for (const auto& r : reports) f << r.to_line() << '\n';
}

std::vector<VerificationReport> read_jsonl(const std::string& path) {
  std::vector<VerificationReport> out;
  std::istringstream in(read_text(path));
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(VerificationReport::from_json(Json::parse(line)));
  return out;
}

namespace {

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

// Rounds a span to 1, 2 or 5 times a power of ten.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

}  // namespace

std::string render_svg(const SvgPlot& plot) {
  constexpr double W = 800, H = 600, L = 90, R = 180, T = 70, B = 70;
  auto tx = [&](double v) { return plot.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      const double a = tx(s.x[i]), b = ty(s.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      x0 = std::min(x0, a);
      x1 = std::max(x1, a);
      y0 = std::min(y0, b);
      y1 = std::max(y1, b);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 <= 0) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 <= 0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double a) { return L + (a - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double b) { return H - B - (b - y0) / (y1 - y0) * (H - T - B); };

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      W, H);
  s += fmt::format("<text x=\"{}\" y=\"28\" font-family=\"sans-serif\" font-size=\"18\" text-anchor=\"middle\">{}</text>\n",
                   W / 2, escape(plot.title));
  if (!plot.annotation.empty())
    s += fmt::format("<text x=\"{}\" y=\"50\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
                     "fill=\"#444\">{}</text>\n",
                     W / 2, escape(plot.annotation));
  s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", L, T,
                   W - L - R, H - T - B);
  auto ticks = [&](double lo, double hi, bool vertical, bool logscale) {
    const double step = nice_step(hi - lo, 6);
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
      const std::string label = logscale ? fmt::format("1e{:g}", v) : fmt::format("{:g}", std::abs(v) < 1e-12 * step ? 0.0 : v);
      if (vertical) {
        const double y = py(v);
        s += fmt::format("<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n", L, y, W - R, y);
        s += fmt::format("<text x=\"{}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
                         "text-anchor=\"end\">{}</text>\n",
                         L - 6, y + 4, label);
      } else {
        const double x = px(v);
        s += fmt::format("<line x1=\"{:.2f}\" y1=\"{}\" x2=\"{:.2f}\" y2=\"{}\" stroke=\"#ddd\"/>\n", x, T, x, H - B);
        s += fmt::format("<text x=\"{:.2f}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" "
                         "text-anchor=\"middle\">{}</text>\n",
                         x, H - B + 16, label);
      }
    }
  };
  ticks(x0, x1, false, plot.log_x);
  ticks(y0, y1, true, plot.log_y);
  s += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
                   L + (W - L - R) / 2, H - 22, escape(plot.x_label));
  s += fmt::format("<text x=\"22\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
                   "transform=\"rotate(-90 22 {})\">{}</text>\n",
                   T + (H - T - B) / 2, T + (H - T - B) / 2, escape(plot.y_label));
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& ser = plot.series[k];
    const char* col = colors[k % 6];
    std::string pts;
    for (std::size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i) {
      const double a = tx(ser.x[i]), b = ty(ser.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      pts += fmt::format("{:.2f},{:.2f} ", px(a), py(b));
      if (ser.markers) s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", px(a), py(b), col);
    }
    s += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"/>\n", pts, col);
    const double ly = T + 14 + 20.0 * k;
    s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n", W - R + 12, ly,
                     W - R + 36, ly, col);
    s += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n", W - R + 42,
                     ly + 4, escape(ser.label));
  }
  s += "</svg>\n";
  return s;
}

}  // namespace capsym
