#pragma once

// CSV emission with a stable on-disk format: fixed column order, 6
// significant digits, rows sorted by their key columns. Identical inputs
// produce identical bytes.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <tuple>
#include <vector>

#include "mcf/monte_carlo.hpp"

namespace mcftool {

inline std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct SummaryRow {
  std::string scenario;
  std::string filter;
  std::string component;
  double trmse = 0.0;
  double mean_iterations = 0.0;
};

inline std::vector<SummaryRow> summary_rows(const std::string& scenario,
                                            const mcf::MetricsReport& report) {
  std::vector<SummaryRow> rows;
  for (const auto& fm : report.filters) {
    for (int c = 0; c < fm.trmse.size(); ++c) {
      rows.push_back({scenario, fm.name, "x" + std::to_string(c + 1), fm.trmse(c),
                      fm.mean_iterations});
    }
  }
  return rows;
}

inline void sort_summary(std::vector<SummaryRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    return std::tie(a.scenario, a.filter, a.component) <
           std::tie(b.scenario, b.filter, b.component);
  });
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path.string());
  return out;
}

inline void write_summary_csv(const std::filesystem::path& path, std::vector<SummaryRow> rows) {
  sort_summary(rows);
  auto out = open_out(path);
  out << "scenario,filter,component,trmse,mean_iterations\n";
  for (const auto& r : rows)
    out << r.scenario << ',' << r.filter << ',' << r.component << ',' << fmt6(r.trmse) << ','
        << fmt6(r.mean_iterations) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Per-step RMSE series; rows ordered by (filter, component, t), t counted
// from 1 like the experiment horizon.
inline void write_per_step_csv(const std::filesystem::path& path,
                               const mcf::MetricsReport& report) {
  std::vector<const mcf::FilterMetrics*> ordered;
  for (const auto& fm : report.filters) ordered.push_back(&fm);
  std::sort(ordered.begin(), ordered.end(),
            [](const mcf::FilterMetrics* a, const mcf::FilterMetrics* b) { return a->name < b->name; });

  auto out = open_out(path);
  out << "filter,component,t,rmse\n";
  for (const auto* fm : ordered) {
    for (int c = 0; c < fm->rmse_series.rows(); ++c)
      for (int t = 0; t < fm->rmse_series.cols(); ++t)
        out << fm->name << ",x" << (c + 1) << ',' << (t + 1) << ','
            << fmt6(fm->rmse_series(c, t)) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Wide table for the alpha sweep: one row per (scenario, component), one
// column per alpha value.
inline void write_wide_alpha_csv(const std::filesystem::path& path,
                                 const std::vector<double>& alphas,
                                 std::vector<std::tuple<std::string, std::string, std::vector<double>>> rows) {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  auto out = open_out(path);
  out << "scenario,component";
  for (double a : alphas) out << ",alpha_" << fmt6(a);
  out << '\n';
  for (const auto& [scenario, component, values] : rows) {
    out << scenario << ',' << component;
    for (double v : values) out << ',' << fmt6(v);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void print_summary(std::FILE* stream, const std::vector<SummaryRow>& rows) {
  std::fprintf(stream, "%-22s %-8s %-10s %12s %16s\n", "scenario", "filter", "component", "trmse",
               "mean_iterations");
  for (const auto& r : rows)
    std::fprintf(stream, "%-22s %-8s %-10s %12s %16s\n", r.scenario.c_str(), r.filter.c_str(),
                 r.component.c_str(), fmt6(r.trmse).c_str(), fmt6(r.mean_iterations).c_str());
}

}  // namespace mcftool
