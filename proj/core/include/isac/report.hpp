#pragma once

#include <string>
#include <vector>

#include "isac/types.hpp"

namespace isac {

struct ResultRow {
  double sweep_value = 0.0;
  std::string baseline;
  std::string metric;
  double value = 0.0;
  double std_err = 0.0;
  long n_dropped = 0;
};

/// Deterministic short representation (%.12g); identical input bytes out.
std::string format_double(double v);

/// Fixed-schema CSV: header sweep_value,baseline,metric,value,stderr,n_dropped.
/// Rows are written in the given order; callers sort first for determinism.
void write_csv(const std::string& path, const std::vector<ResultRow>& rows);

std::vector<ResultRow> read_csv(const std::string& path);

/// Stable ordering by (sweep_value, baseline, metric).
void sort_rows(std::vector<ResultRow>& rows);

/// One static SVG line chart per metric present in `rows`, one polyline per
/// baseline, written as <stem>_<metric>.svg. Best effort companion to the
/// CSV contract.
void write_svg_plots(const std::string& dir, const std::string& stem,
                     const std::vector<ResultRow>& rows,
                     const std::string& sweep_label);

}  // namespace isac
