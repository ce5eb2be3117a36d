#include "isac/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace isac {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     if (a.sweep_value != b.sweep_value) {
                       return a.sweep_value < b.sweep_value;
                     }
                     if (a.baseline != b.baseline) return a.baseline < b.baseline;
                     return a.metric < b.metric;
                   });
}

void write_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("write_csv: cannot open " + path);
  f << "sweep_value,baseline,metric,value,stderr,n_dropped\n";
  for (const auto& r : rows) {
    f << format_double(r.sweep_value) << ',' << r.baseline << ',' << r.metric
      << ',' << format_double(r.value) << ',' << format_double(r.std_err)
      << ',' << r.n_dropped << '\n';
  }
  if (!f) throw IoError("write_csv: write failed for " + path);
}

std::vector<ResultRow> read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("read_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw IoError("read_csv: empty file " + path);
  if (line != "sweep_value,baseline,metric,value,stderr,n_dropped") {
    throw IoError("read_csv: unexpected header in " + path);
  }
  std::vector<ResultRow> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    ResultRow r;
    std::getline(ss, field, ',');
    r.sweep_value = std::stod(field);
    std::getline(ss, r.baseline, ',');
    std::getline(ss, r.metric, ',');
    std::getline(ss, field, ',');
    r.value = std::stod(field);
    std::getline(ss, field, ',');
    r.std_err = std::stod(field);
    std::getline(ss, field, ',');
    r.n_dropped = std::stol(field);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

const char* series_color(size_t i) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
  return kPalette[i % 8];
}

}  // namespace

void write_svg_plots(const std::string& dir, const std::string& stem,
                     const std::vector<ResultRow>& rows,
                     const std::string& sweep_label) {
  std::set<std::string> metrics;
  for (const auto& r : rows) metrics.insert(r.metric);

  for (const auto& metric : metrics) {
    // baseline -> ordered (x, y)
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    bool first = true;
    for (const auto& r : rows) {
      if (r.metric != metric) continue;
      series[r.baseline].emplace_back(r.sweep_value, r.value);
      if (first) {
        x_lo = x_hi = r.sweep_value;
        y_lo = y_hi = r.value;
        first = false;
      } else {
        x_lo = std::min(x_lo, r.sweep_value);
        x_hi = std::max(x_hi, r.sweep_value);
        y_lo = std::min(y_lo, r.value);
        y_hi = std::max(y_hi, r.value);
      }
    }
    if (series.empty()) continue;
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;

    const double w = 760, h = 480, ml = 70, mr = 160, mt = 30, mb = 50;
    auto px = [&](double x) {
      return ml + (x - x_lo) / (x_hi - x_lo) * (w - ml - mr);
    };
    auto py = [&](double y) {
      return h - mb - (y - y_lo) / (y_hi - y_lo) * (h - mt - mb);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
        << "\" height=\"" << h << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
        << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
        << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << (ml + (w - ml - mr) / 2) << "\" y=\"" << h - 12
        << "\" text-anchor=\"middle\" font-size=\"14\">" << sweep_label
        << "</text>\n";
    svg << "<text x=\"18\" y=\"" << (mt + (h - mt - mb) / 2)
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 "
           "18 "
        << (mt + (h - mt - mb) / 2) << ")\">" << metric << "</text>\n";
    svg << "<text x=\"" << ml << "\" y=\"" << h - mb + 18
        << "\" font-size=\"12\">" << format_double(x_lo) << "</text>\n";
    svg << "<text x=\"" << w - mr << "\" y=\"" << h - mb + 18
        << "\" text-anchor=\"end\" font-size=\"12\">" << format_double(x_hi)
        << "</text>\n";
    svg << "<text x=\"" << ml - 6 << "\" y=\"" << h - mb
        << "\" text-anchor=\"end\" font-size=\"12\">" << format_double(y_lo)
        << "</text>\n";
    svg << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 6
        << "\" text-anchor=\"end\" font-size=\"12\">" << format_double(y_hi)
        << "</text>\n";

    size_t idx = 0;
    for (const auto& [name, pts] : series) {
      svg << "<polyline fill=\"none\" stroke=\"" << series_color(idx)
          << "\" stroke-width=\"2\" points=\"";
      for (const auto& [x, y] : pts) {
        svg << format_double(px(x)) << ',' << format_double(py(y)) << ' ';
      }
      svg << "\"/>\n";
      svg << "<text x=\"" << w - mr + 10 << "\" y=\"" << mt + 16 * (idx + 1)
          << "\" font-size=\"13\" fill=\"" << series_color(idx) << "\">" << name
          << "</text>\n";
      ++idx;
    }
    svg << "</svg>\n";

    std::ofstream f(dir + "/" + stem + "_" + metric + ".svg", std::ios::binary);
    if (!f) throw IoError("write_svg_plots: cannot open output in " + dir);
    f << svg.str();
  }
}

}  // namespace isac
