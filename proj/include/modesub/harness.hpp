#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modesub/assembly.hpp"
#include "modesub/errors.hpp"
#include "modesub/geometry.hpp"
#include "modesub/modes.hpp"
#include "modesub/solver.hpp"

namespace modesub {

enum class CaseId { Poisson1DSingle, Poisson1DTwo, Poisson2DRadial };
enum class RunMethod { Schur, FixedPoint, BaselineFd2 };
enum class ReportFormat { Csv, Markdown };

inline std::string case_id_name(CaseId id) {
  switch (id) {
    case CaseId::Poisson1DSingle: return "poisson1d-single";
    case CaseId::Poisson1DTwo: return "poisson1d-two";
    case CaseId::Poisson2DRadial: return "poisson2d-radial";
  }
  throw ValidationError("case_id_name: unhandled id");
}

inline CaseId parse_case_id(std::string_view name) {
  if (name == "poisson1d-single") return CaseId::Poisson1DSingle;
  if (name == "poisson1d-two") return CaseId::Poisson1DTwo;
  if (name == "poisson2d-radial") return CaseId::Poisson2DRadial;
  throw UnknownCase("unknown case id: " + std::string(name));
}

inline std::string run_method_name(RunMethod m) {
  switch (m) {
    case RunMethod::Schur: return "schur";
    case RunMethod::FixedPoint: return "fixed-point";
    case RunMethod::BaselineFd2: return "baseline-fd2";
  }
  throw ValidationError("run_method_name: unhandled method");
}

inline RunMethod parse_run_method(std::string_view name) {
  if (name == "schur") return RunMethod::Schur;
  if (name == "fixed-point") return RunMethod::FixedPoint;
  if (name == "baseline-fd2") return RunMethod::BaselineFd2;
  throw ValidationError("unknown method: " + std::string(name));
}

inline std::string report_format_name(ReportFormat f) {
  return f == ReportFormat::Csv ? "csv" : "md";
}

inline ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "md") return ReportFormat::Markdown;
  throw ValidationError("unknown report format: " + std::string(name));
}

/// One convergence sweep: which case, stencil order, recovery method, and
/// grid resolutions to run, plus where to put the report.
struct ExperimentConfig {
  CaseId case_id = CaseId::Poisson1DSingle;
  int order = 2;
  RunMethod method = RunMethod::Schur;
  std::vector<int> n_list = {20, 40, 80, 160, 320, 640};
  std::string output_path;  // empty: caller handles emission
  ReportFormat output_format = ReportFormat::Csv;
};

struct ReportRow {
  int n = 0;
  double h = 0.0;
  double linf_error = 0.0;
  std::optional<double> roc;  // absent on the first row / non-doubling N
  std::vector<double> k_abs_errors;
};

struct ConvergenceReport {
  std::vector<ReportRow> rows;
};

/// The three shipped problems, posed at resolution `n` with the given
/// stencil order. All have known exact solutions and coefficients:
///   poisson1d-single: u = 2 sqrt(x) on [0, pi], one sqrt mode, k = (2);
///   poisson1d-two: u = 2 x^(1/2) + 3 x^(3/2), two modes, k = (2, 3);
///   poisson2d-radial: u = sqrt(r) on [-1, 1]^2, circular interface of
///     radius 1/2, one radial mode, k = (1).
inline CaseSpec builtin_case(CaseId id, int n, int order) {
  switch (id) {
    case CaseId::Poisson1DSingle: {
      auto exact = [](Point p) { return 2.0 * std::sqrt(p[0]); };
      return CaseSpec(
          UniformGrid::line(0.0, std::numbers::pi, n),
          InterfaceGeometry::point(0.5),
          ModeBasis::of({SingularMode::power1d(0.5)}), order,
          [](Point p) { return -0.5 * std::pow(p[0], -1.5); }, exact, exact,
          {2.0});
    }
    case CaseId::Poisson1DTwo: {
      auto exact = [](Point p) {
        return 2.0 * std::sqrt(p[0]) + 3.0 * std::pow(p[0], 1.5);
      };
      return CaseSpec(
          UniformGrid::line(0.0, std::numbers::pi, n),
          InterfaceGeometry::point(0.5),
          ModeBasis::of(
              {SingularMode::power1d(0.5), SingularMode::power1d(1.5)}),
          order,
          [](Point p) {
            return -0.5 * std::pow(p[0], -1.5) + 2.25 * std::pow(p[0], -0.5);
          },
          exact, exact, {2.0, 3.0});
    }
    case CaseId::Poisson2DRadial: {
      auto exact = [](Point p) {
        return std::pow(p[0] * p[0] + p[1] * p[1], 0.25);
      };
      return CaseSpec(
          UniformGrid::square({-1.0, -1.0}, {1.0, 1.0}, n),
          InterfaceGeometry::circle({0.0, 0.0}, 0.5),
          ModeBasis::of({SingularMode::radial2d(0.5)}), order,
          [](Point p) {
            return 0.25 * std::pow(std::hypot(p[0], p[1]), -1.5);
          },
          exact, exact, {1.0});
    }
  }
  throw UnknownCase("builtin_case: unhandled id");
}

inline CaseSpec builtin_case(std::string_view name, int n, int order) {
  return builtin_case(parse_case_id(name), n, order);
}

/// A grid paired with one value per node (solution or error field).
struct GridFunction {
  UniformGrid grid;
  std::vector<double> values;
};

/// Plain second-order central differences applied to the original problem
/// at resolution `n`, with no interface treatment: the reference whose slow
/// convergence the subtraction scheme is measured against. 1-D only. The
/// node at the singular end is Dirichlet data, so the unbounded source is
/// never evaluated there.
inline GridFunction baseline_fd2(const CaseSpec& spec, int n) {
  if (spec.grid.dim() != 1)
    throw ValidationError("baseline_fd2: 1-D cases only");
  const UniformGrid grid =
      UniformGrid::line(spec.grid.lower(0), spec.grid.upper(0), n);
  const double h = grid.spacing(0);

  const std::int64_t interior = n - 1;
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(interior) * 3);
  std::vector<double> rhs(interior);
  const double w = 1.0 / (h * h);
  for (std::int64_t i = 1; i < n; ++i) {
    const std::int64_t row = i - 1;
    rhs[row] = spec.source({grid.coord({static_cast<int>(i), 0})[0], 0.0});
    triplets.push_back({row, row, -2.0 * w});
    if (i == 1)
      rhs[row] -= w * spec.boundary({grid.lower(0), 0.0});
    else
      triplets.push_back({row, row - 1, w});
    if (i == n - 1)
      rhs[row] -= w * spec.boundary({grid.upper(0), 0.0});
    else
      triplets.push_back({row, row + 1, w});
  }
  const auto u_int =
      factor(SparseMatrix::from_triplets(interior, interior, triplets))
          .solve(rhs);

  GridFunction out{grid, std::vector<double>(grid.node_count())};
  out.values.front() = spec.boundary({grid.lower(0), 0.0});
  out.values.back() = spec.boundary({grid.upper(0), 0.0});
  std::copy(u_int.begin(), u_int.end(), out.values.begin() + 1);
  return out;
}

/// log2(errCoarse / errFine): the observed order under grid doubling.
inline double compute_roc(double err_coarse, double err_fine) {
  if (!(err_coarse > 0.0) || !(err_fine > 0.0))
    throw NonpositiveError("compute_roc: errors must be positive");
  return std::log2(err_coarse / err_fine);
}

namespace detail {

inline double linf_diff_vs_exact(const UniformGrid& grid,
                                 std::span<const double> u,
                                 const ScalarField& exact) {
  double worst = 0.0;
  for (std::int64_t lin = 0; lin < grid.node_count(); ++lin)
    worst = std::max(worst,
                     std::abs(u[lin] - exact(grid.coord(grid.node_at(lin)))));
  return worst;
}

}  // namespace detail

/// Run the full sweep: one report row per resolution, with the max-norm
/// error against the exact solution over every grid node, the observed
/// convergence rate between doubled resolutions, and per-mode coefficient
/// errors (empty for the baseline, which recovers no coefficients).
inline ConvergenceReport run_experiment(const ExperimentConfig& config) {
  if (config.n_list.empty())
    throw ValidationError("run_experiment: empty resolution list");
  for (std::size_t i = 1; i < config.n_list.size(); ++i)
    if (config.n_list[i] <= config.n_list[i - 1])
      throw ValidationError(
          "run_experiment: resolution list must be strictly increasing");

  ConvergenceReport report;
  for (std::size_t idx = 0; idx < config.n_list.size(); ++idx) {
    const int n = config.n_list[idx];
    const CaseSpec spec = builtin_case(config.case_id, n, config.order);

    ReportRow row;
    row.n = n;
    row.h = spec.grid.spacing(0);
    if (config.method == RunMethod::BaselineFd2) {
      const GridFunction u = baseline_fd2(spec, n);
      row.linf_error =
          detail::linf_diff_vs_exact(u.grid, u.values, spec.exact_solution);
    } else {
      const Method method = config.method == RunMethod::Schur
                                ? Method::Schur
                                : Method::FixedPoint;
      const RecoveryResult sol = solve_case(spec, method);
      row.linf_error = detail::linf_diff_vs_exact(spec.grid, sol.u_full,
                                                  spec.exact_solution);
      row.k_abs_errors.resize(sol.k.size());
      for (std::size_t i = 0; i < sol.k.size(); ++i)
        row.k_abs_errors[i] =
            std::abs(sol.k[i] - spec.exact_coefficients[i]);
    }

    if (idx > 0 && n == 2 * config.n_list[idx - 1])
      row.roc = compute_roc(report.rows.back().linf_error, row.linf_error);

    bool finite = std::isfinite(row.h) && std::isfinite(row.linf_error) &&
                  (!row.roc || std::isfinite(*row.roc));
    for (double e : row.k_abs_errors) finite = finite && std::isfinite(e);
    if (!finite)
      throw ValidationError("run_experiment: non-finite value in report row");

    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace detail {

/// Shortest decimal form that parses back to the identical double.
inline std::string fmt_double(double v) {
  for (int prec = 1; prec <= 17; ++prec) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    if (std::stod(os.str()) == v) return os.str();
  }
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string report_header(const ConvergenceReport& report,
                                 std::string_view sep) {
  std::string header = std::string("N") + std::string(sep) + "h" +
                       std::string(sep) + "linf_error" + std::string(sep) +
                       "roc";
  const std::size_t n_k =
      report.rows.empty() ? 0 : report.rows.front().k_abs_errors.size();
  for (std::size_t i = 1; i <= n_k; ++i)
    header += std::string(sep) + "k_err_" + std::to_string(i);
  return header;
}

}  // namespace detail

inline std::string to_csv(const ConvergenceReport& report) {
  std::string out = detail::report_header(report, ",") + "\n";
  for (const ReportRow& row : report.rows) {
    out += std::to_string(row.n) + "," + detail::fmt_double(row.h) + "," +
           detail::fmt_double(row.linf_error) + ",";
    if (row.roc) out += detail::fmt_double(*row.roc);
    for (double e : row.k_abs_errors) out += "," + detail::fmt_double(e);
    out += "\n";
  }
  return out;
}

inline std::string to_markdown(const ConvergenceReport& report) {
  const std::string header = detail::report_header(report, " | ");
  std::size_t cols = 4;
  if (!report.rows.empty()) cols += report.rows.front().k_abs_errors.size();
  std::string out = "| " + header + " |\n|";
  for (std::size_t c = 0; c < cols; ++c) out += " --- |";
  out += "\n";
  for (const ReportRow& row : report.rows) {
    out += "| " + std::to_string(row.n) + " | " + detail::fmt_double(row.h) +
           " | " + detail::fmt_double(row.linf_error) + " | ";
    if (row.roc) out += detail::fmt_double(*row.roc);
    out += " |";
    for (double e : row.k_abs_errors) out += " " + detail::fmt_double(e) + " |";
    out += "\n";
  }
  return out;
}

inline void emit_report(const ConvergenceReport& report, ReportFormat format,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("emit_report: cannot open " + path);
  out << (format == ReportFormat::Csv ? to_csv(report) : to_markdown(report));
  if (!out) throw IoFailure("emit_report: write failed for " + path);
}

/// Inverse of to_csv, so emitted reports can be round-tripped exactly.
inline ConvergenceReport parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("parse_report_csv: missing header");
  if (line.rfind("N,h,linf_error,roc", 0) != 0)
    throw ValidationError("parse_report_csv: unexpected header: " + line);

  ConvergenceReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    if (fields.size() < 4)
      throw ValidationError("parse_report_csv: short row: " + line);
    ReportRow row;
    row.n = std::stoi(fields[0]);
    row.h = std::stod(fields[1]);
    row.linf_error = std::stod(fields[2]);
    if (!fields[3].empty()) row.roc = std::stod(fields[3]);
    for (std::size_t i = 4; i < fields.size(); ++i)
      row.k_abs_errors.push_back(std::stod(fields[i]));
    report.rows.push_back(std::move(row));
  }
  return report;
}

/// Write one node per line as "x,value" (1-D) or "x,y,value" (2-D), in
/// linear node order.
inline void emit_field(const GridFunction& field, const std::string& path) {
  if (static_cast<std::int64_t>(field.values.size()) !=
      field.grid.node_count())
    throw DimensionMismatch("emit_field: value count != node count");
  std::ofstream out(path);
  if (!out) throw IoFailure("emit_field: cannot open " + path);
  for (std::int64_t lin = 0; lin < field.grid.node_count(); ++lin) {
    const Point p = field.grid.coord(field.grid.node_at(lin));
    out << detail::fmt_double(p[0]);
    if (field.grid.dim() == 2) out << "," << detail::fmt_double(p[1]);
    out << "," << detail::fmt_double(field.values[lin]) << "\n";
  }
  if (!out) throw IoFailure("emit_field: write failed for " + path);
}

}  // namespace modesub
