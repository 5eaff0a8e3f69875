#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "modesub/modes.hpp"

namespace modesub {

/// Result of validating one mode's analytic derivatives against high-order
/// finite differences of its own values.
struct DerivativeCheckEntry {
  std::string label;
  int samples = 0;
  double worst_gradient_rel = 0.0;
  double worst_laplacian_rel = 0.0;
  bool ok = false;
};

struct DerivativeCheckReport {
  std::vector<DerivativeCheckEntry> entries;
  double tolerance = 0.0;
  bool all_ok = false;
};

namespace detail {

/// Fourth-order central differences of f along axis `ax` at x, step h.
template <typename F>
double fd_first(const F& f, Point x, int ax, double h) {
  auto at = [&](double s) {
    Point p = x;
    p[ax] += s;
    return f(p);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

template <typename F>
double fd_second(const F& f, Point x, int ax, double h) {
  auto at = [&](double s) {
    Point p = x;
    p[ax] += s;
    return f(p);
  };
  return (-at(2 * h) + 16 * at(h) - 30 * at(0) + 16 * at(-h) - at(-2 * h)) /
         (12 * h * h);
}

}  // namespace detail

/// Compare analytic gradient and Laplacian of `mode` against fourth-order
/// finite differences of eval_value at `samples` deterministic points with
/// 0.1 <= |x - x0| <= 1.5 (kept clear of any half-line / branch-cut edge so
/// the difference stencils stay inside the valid region). The relative error
/// denominator is floored at 1e-2 times the largest sampled magnitude of the
/// quantity, so near-zeros of a derivative cannot inflate the ratio.
inline DerivativeCheckEntry check_mode_derivatives(const SingularMode& mode,
                                                   std::string label,
                                                   int samples = 200,
                                                   double tolerance = 1e-6) {
  const double h = 1e-3;
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> radial(0.1, 1.5);
  // Margin keeps every FD arm within the crack mode's (-pi, pi) sector.
  std::uniform_real_distribution<double> angular(-std::numbers::pi + 0.05,
                                                 std::numbers::pi - 0.05);

  std::vector<Point> pts(samples);
  for (int s = 0; s < samples; ++s) {
    if (mode.dim() == 1) {
      pts[s] = {mode.center()[0] + radial(rng), 0.0};
    } else {
      const double r = radial(rng), th = angular(rng);
      pts[s] = {mode.center()[0] + r * std::cos(th),
                mode.center()[1] + r * std::sin(th)};
    }
  }

  auto value = [&](Point p) { return eval_value(mode, p); };

  std::vector<std::array<double, 2>> grad_ex(samples);
  std::vector<double> lap_ex(samples);
  double grad_scale = 0.0, lap_scale = 0.0;
  for (int s = 0; s < samples; ++s) {
    grad_ex[s] = eval_gradient(mode, pts[s]);
    lap_ex[s] = eval_laplacian(mode, pts[s]);
    for (int ax = 0; ax < mode.dim(); ++ax)
      grad_scale = std::max(grad_scale, std::abs(grad_ex[s][ax]));
    lap_scale = std::max(lap_scale, std::abs(lap_ex[s]));
  }

  DerivativeCheckEntry entry;
  entry.label = std::move(label);
  entry.samples = samples;
  for (int s = 0; s < samples; ++s) {
    double lap_fd = 0.0;
    for (int ax = 0; ax < mode.dim(); ++ax) {
      const double g_fd = detail::fd_first(value, pts[s], ax, h);
      const double denom =
          std::max(std::abs(grad_ex[s][ax]), 1e-2 * grad_scale);
      entry.worst_gradient_rel = std::max(
          entry.worst_gradient_rel, std::abs(g_fd - grad_ex[s][ax]) / denom);
      lap_fd += detail::fd_second(value, pts[s], ax, h);
    }
    const double denom = std::max(std::abs(lap_ex[s]), 1e-2 * lap_scale);
    entry.worst_laplacian_rel = std::max(
        entry.worst_laplacian_rel, std::abs(lap_fd - lap_ex[s]) / denom);
  }
  entry.ok = entry.worst_gradient_rel <= tolerance &&
             entry.worst_laplacian_rel <= tolerance;
  return entry;
}

/// The standard suite over every analytic family, at the material constants
/// the solver and tests exercise.
inline DerivativeCheckReport run_derivative_checks(int samples = 200,
                                                   double tolerance = 1e-6) {
  DerivativeCheckReport report;
  report.tolerance = tolerance;
  auto add = [&](const SingularMode& mode, const std::string& label) {
    report.entries.push_back(
        check_mode_derivatives(mode, label, samples, tolerance));
  };
  add(SingularMode::power1d(0.5), "power1d p=1/2");
  add(SingularMode::power1d(1.5), "power1d p=3/2");
  add(SingularMode::radial2d(0.5), "radial2d p=1/2");
  add(SingularMode::crack_mode_ix(1.0), "crack kappa=1.0");
  add(SingularMode::crack_mode_ix(1.8), "crack kappa=1.8");
  add(SingularMode::crack_mode_ix(2.2), "crack kappa=2.2");
  add(SingularMode::polynomial({3, 2}), "polynomial x^3 y^2");
  report.all_ok = true;
  for (const auto& e : report.entries) report.all_ok = report.all_ok && e.ok;
  return report;
}

}  // namespace modesub
