#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nvrpg/config.hpp"
#include "nvrpg/train_log.hpp"

namespace nvrpg {

inline constexpr int kCsvSchemaVersion = 1;

/// Shortest round-trippable decimal rendering; NaN becomes an empty cell.
inline std::string csv_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Writes one run log as CSV with a leading commented metadata block carrying
/// the resolved config. The header row enumerates the TrainRow fields (plus
/// the regression diagnostics for function-approximation runs) and ends with
/// schema_version.
inline void write_train_log_csv(const TrainLog& log, const Config& resolved,
                                const std::string& path, bool with_regression_columns) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_train_log_csv: cannot write " + path);
  out << "# nvrpg run log\n";
  out << "# schema_version=" << kCsvSchemaVersion << "\n";
  // the output directory is the one key that may differ between otherwise
  // identical runs, so it stays out of the determinism-checked metadata
  for (const auto& [key, value] : resolved.entries())
    if (key != "out") out << "# " << key << "=" << value << "\n";
  if (log.aborted) out << "# aborted=" << log.abort_reason << "\n";

  out << "t,steps,alpha_t,eta_t,F_exact,J_exact,grad_norm_exact,d_norm,is_weight,is_bound";
  if (with_regression_columns) out << ",reg_K,reg_final_avg_loss,reg_fit_residual_at_visited";
  out << ",schema_version\n";

  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    const TrainRow& row = log.rows[i];
    out << row.t << ',' << row.steps << ',' << csv_double(row.alpha) << ','
        << csv_double(row.eta) << ',' << csv_double(row.f_exact) << ','
        << csv_double(row.j_exact) << ',' << csv_double(row.grad_norm_exact) << ','
        << csv_double(row.d_norm) << ',' << csv_double(row.is_weight) << ','
        << csv_double(row.is_bound);
    if (with_regression_columns) {
      if (i < log.regression_rows.size()) {
        const RegressionDiagRow& diag = log.regression_rows[i];
        out << ',' << diag.k << ',' << csv_double(diag.final_avg_loss) << ','
            << csv_double(diag.fit_residual_at_visited);
      } else {
        out << ",,,";
      }
    }
    out << ',' << kCsvSchemaVersion << '\n';
  }
}

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // NaN for empty cells

  int column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return int(i);
    throw std::invalid_argument("csv: no column named " + name);
  }
};

/// Reads a CSV produced by write_train_log_csv (comment lines skipped).
inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  CsvTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
      if (c == ',') {
        cells.push_back(cell);
        cell.clear();
      } else if (c != '\r') {
        cell += c;
      }
    }
    cells.push_back(cell);
    if (!header_seen) {
      table.columns = cells;
      header_seen = true;
      continue;
    }
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
      row[i] = cells[i].empty() ? kUnset : std::stod(cells[i]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

/// Linear-interpolation quantile (the convention used for the run summaries);
/// NaN entries are excluded first.
inline double quantile(std::vector<double> values, double p) {
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](double v) { return std::isnan(v); }),
               values.end());
  if (values.empty()) return kUnset;
  std::sort(values.begin(), values.end());
  const double pos = p * double(values.size() - 1);
  const std::size_t lo = std::size_t(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - double(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace nvrpg
