#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "modesub/errors.hpp"
#include "modesub/geometry.hpp"

namespace modesub {

namespace detail {

/// One term of a polar series: Re( c * r^a * exp(i*b*theta) ) about some
/// center. Both 2-D mode families below are finite sums of such terms, and
/// the family is closed under partial differentiation:
///
///   d/dx : (c,a,b) -> ((a-b)/2 * c, a-1, b+1) + ((a+b)/2 * c, a-1, b-1)
///   d/dy : (c,a,b) -> (i(b-a)/2 * c, a-1, b+1) + (i(a+b)/2 * c, a-1, b-1)
///   lap  : (c,a,b) -> ((a^2-b^2) * c, a-2, b)
///
/// which gives exact closed-form derivatives of any order.
struct PolarTerm {
  std::complex<double> c;
  double a;
  double b;
};

using PolarSeries = std::vector<PolarTerm>;

inline PolarSeries merge(const PolarSeries& in) {
  std::map<std::pair<double, double>, std::complex<double>> acc;
  for (const auto& t : in) acc[{t.a, t.b}] += t.c;
  PolarSeries out;
  for (const auto& [key, c] : acc)
    if (c != std::complex<double>{0.0, 0.0})
      out.push_back({c, key.first, key.second});
  return out;
}

inline PolarSeries ddx(const PolarSeries& in) {
  PolarSeries out;
  out.reserve(2 * in.size());
  for (const auto& t : in) {
    out.push_back({t.c * (0.5 * (t.a - t.b)), t.a - 1.0, t.b + 1.0});
    out.push_back({t.c * (0.5 * (t.a + t.b)), t.a - 1.0, t.b - 1.0});
  }
  return merge(out);
}

inline PolarSeries ddy(const PolarSeries& in) {
  const std::complex<double> i{0.0, 1.0};
  PolarSeries out;
  out.reserve(2 * in.size());
  for (const auto& t : in) {
    out.push_back({t.c * (i * (0.5 * (t.b - t.a))), t.a - 1.0, t.b + 1.0});
    out.push_back({t.c * (i * (0.5 * (t.a + t.b))), t.a - 1.0, t.b - 1.0});
  }
  return merge(out);
}

inline PolarSeries laplacian(const PolarSeries& in) {
  PolarSeries out;
  out.reserve(in.size());
  for (const auto& t : in)
    out.push_back({t.c * (t.a * t.a - t.b * t.b), t.a - 2.0, t.b});
  return merge(out);
}

inline double eval(const PolarSeries& s, double r, double theta) {
  double v = 0.0;
  for (const auto& t : s) {
    const double rp = std::pow(r, t.a);
    v += rp * (t.c.real() * std::cos(t.b * theta) -
               t.c.imag() * std::sin(t.b * theta));
  }
  return v;
}

/// Falling factorial p(p-1)...(p-m+1).
inline double falling(double p, int m) {
  double f = 1.0;
  for (int j = 0; j < m; ++j) f *= (p - j);
  return f;
}

}  // namespace detail

/// --- Mode families -------------------------------------------------------

/// u(x) = (x - x0)^p on the half-line x > x0.
struct PowerMode1D {
  double p;
};

/// u(x) = r^p with r = |x - x0| in the plane.
struct RadialPowerMode2D {
  double p;
};

/// The opening-mode crack displacement component
///   u(r, theta) = sqrt(r) * ((kappa - 1/2) cos(theta/2) - 1/2 cos(3 theta/2)),
/// defined for -pi < theta < pi; kappa = 3 - 4*nu.
struct CrackModeIX {
  double kappa;
};

/// Monomial prod_c (x_c - x0_c)^{e_c}; a regular (non-singular) mode.
struct Polynomial {
  std::vector<int> exponents;  // one entry per axis
};

/// A single analytically differentiable solution mode centered at x0.
/// `smoothness_radius` is the distance from x0 inside which the mode is NOT
/// guaranteed smooth (0 for families smooth everywhere away from the center;
/// +inf for the crack mode, whose branch cut reaches the center, so no
/// punctured ball around x0 is smooth).
class SingularMode {
 public:
  using Family =
      std::variant<PowerMode1D, RadialPowerMode2D, CrackModeIX, Polynomial>;

  static SingularMode power1d(double p, double x0 = 0.0) {
    return SingularMode(PowerMode1D{p}, {x0, 0.0}, 0.0, 1);
  }
  static SingularMode radial2d(double p, Point x0 = {0.0, 0.0}) {
    return SingularMode(RadialPowerMode2D{p}, x0, 0.0, 2);
  }
  static SingularMode crack_mode_ix(double kappa, Point x0 = {0.0, 0.0}) {
    return SingularMode(CrackModeIX{kappa}, x0,
                        std::numeric_limits<double>::infinity(), 2);
  }
  static SingularMode polynomial(std::vector<int> exponents,
                                 Point x0 = {0.0, 0.0}) {
    const int dim = static_cast<int>(exponents.size());
    if (dim < 1 || dim > 2)
      throw ValidationError("Polynomial mode needs 1 or 2 axis exponents");
    for (int e : exponents)
      if (e < 0) throw ValidationError("Polynomial exponents must be >= 0");
    return SingularMode(Polynomial{std::move(exponents)}, x0, 0.0, dim);
  }

  const Family& family() const { return family_; }
  Point center() const { return x0_; }
  double smoothness_radius() const { return smoothness_radius_; }
  int dim() const { return dim_; }

  /// True for families with a genuine singular center (value/derivatives
  /// unbounded or undefined at x0).
  bool singular() const {
    return !std::holds_alternative<Polynomial>(family_);
  }

  /// Positive power exponent: the mode value tends to 0 at its center. Used
  /// by reconstruction (and boundary folding) to take the limit value there.
  bool vanishes_at_center() const {
    if (const auto* p = std::get_if<PowerMode1D>(&family_)) return p->p > 0.0;
    if (const auto* p = std::get_if<RadialPowerMode2D>(&family_))
      return p->p > 0.0;
    if (std::holds_alternative<CrackModeIX>(family_)) return true;  // ~ sqrt(r)
    const auto& e = std::get<Polynomial>(family_).exponents;
    for (int c : e)
      if (c > 0) return true;  // some factor vanishes at the center
    return false;              // constant mode
  }

  /// Is the mode defined and smooth at x? (Strictly: x must avoid the
  /// center, the power mode's off half-line, and the crack branch cut.)
  bool smooth_at(Point x) const {
    if (std::holds_alternative<Polynomial>(family_)) return true;
    const double dx = x[0] - x0_[0], dy = x[1] - x0_[1];
    if (std::holds_alternative<PowerMode1D>(family_)) return dx > 0.0;
    const double r = std::hypot(dx, dy);
    if (r == 0.0) return false;
    if (std::holds_alternative<CrackModeIX>(family_)) {
      const double theta = std::atan2(dy, dx);
      return std::abs(theta) < std::numbers::pi;
    }
    return true;  // radial power
  }

 private:
  SingularMode(Family f, Point x0, double sr, int dim)
      : family_(std::move(f)), x0_(x0), smoothness_radius_(sr), dim_(dim) {}

  Family family_;
  Point x0_;
  double smoothness_radius_;
  int dim_;
};

namespace detail {

inline PolarSeries base_series(const SingularMode& mode) {
  if (const auto* rp = std::get_if<RadialPowerMode2D>(&mode.family()))
    return {{{1.0, 0.0}, rp->p, 0.0}};
  const auto& ck = std::get<CrackModeIX>(mode.family());
  const double c1 = 0.5 * (ck.kappa - 0.5);  // cos(b t) = (e^{ibt}+e^{-ibt})/2
  return {{{c1, 0.0}, 0.5, 0.5},
          {{c1, 0.0}, 0.5, -0.5},
          {{-0.25, 0.0}, 0.5, 1.5},
          {{-0.25, 0.0}, 0.5, -1.5}};
}

/// Polar coordinates of x about the mode center, validating the mode's
/// domain: throws EvalAtSingularCenter at r = 0 and EvalOutsideValidRegion
/// on the crack branch cut |theta| >= pi.
inline std::pair<double, double> polar_checked(const SingularMode& mode,
                                               Point x) {
  const double dx = x[0] - mode.center()[0], dy = x[1] - mode.center()[1];
  const double r = std::hypot(dx, dy);
  if (r == 0.0)
    throw EvalAtSingularCenter("mode evaluated at its singular center");
  const double theta = std::atan2(dy, dx);
  if (std::holds_alternative<CrackModeIX>(mode.family()) &&
      std::abs(theta) >= std::numbers::pi)
    throw EvalOutsideValidRegion(
        "crack mode evaluated on its branch cut (theta = +-pi)");
  return {r, theta};
}

inline double power1d_shift(const SingularMode& mode, Point x) {
  const double t = x[0] - mode.center()[0];
  if (t == 0.0)
    throw EvalAtSingularCenter("mode evaluated at its singular center");
  if (t < 0.0)
    throw EvalOutsideValidRegion("half-line power mode evaluated left of its center");
  return t;
}

inline double poly_axis_factor(int e, double t, int deriv) {
  if (deriv > e) return 0.0;
  double f = 1.0;
  for (int j = 0; j < deriv; ++j) f *= (e - j);
  double tp = 1.0;
  for (int j = 0; j < e - deriv; ++j) tp *= t;
  return f * tp;
}

}  // namespace detail

/// --- Evaluation ----------------------------------------------------------

inline double eval_value(const SingularMode& mode, Point x) {
  if (const auto* pm = std::get_if<PowerMode1D>(&mode.family()))
    return std::pow(detail::power1d_shift(mode, x), pm->p);
  if (const auto* poly = std::get_if<Polynomial>(&mode.family())) {
    double v = 1.0;
    for (std::size_t ax = 0; ax < poly->exponents.size(); ++ax)
      v *= detail::poly_axis_factor(poly->exponents[ax],
                                    x[ax] - mode.center()[ax], 0);
    return v;
  }
  const auto [r, theta] = detail::polar_checked(mode, x);
  return detail::eval(detail::base_series(mode), r, theta);
}

/// m-th pure derivative along `axis` (m <= 4), in closed form.
inline double eval_axis_derivative(const SingularMode& mode, Point x, int axis,
                                   int order) {
  if (order < 0 || order > 4)
    throw ValidationError("eval_axis_derivative: order must be in [0, 4]");
  if (axis < 0 || axis >= mode.dim())
    throw DimensionMismatch("eval_axis_derivative: axis out of range");
  if (const auto* pm = std::get_if<PowerMode1D>(&mode.family())) {
    const double t = detail::power1d_shift(mode, x);
    return detail::falling(pm->p, order) * std::pow(t, pm->p - order);
  }
  if (const auto* poly = std::get_if<Polynomial>(&mode.family())) {
    double v = 1.0;
    for (std::size_t ax = 0; ax < poly->exponents.size(); ++ax)
      v *= detail::poly_axis_factor(poly->exponents[ax],
                                    x[ax] - mode.center()[ax],
                                    static_cast<int>(ax) == axis ? order : 0);
    return v;
  }
  const auto [r, theta] = detail::polar_checked(mode, x);
  auto series = detail::base_series(mode);
  for (int m = 0; m < order; ++m)
    series = axis == 0 ? detail::ddx(series) : detail::ddy(series);
  return detail::eval(series, r, theta);
}

inline std::array<double, 2> eval_gradient(const SingularMode& mode, Point x) {
  std::array<double, 2> g{0.0, 0.0};
  for (int ax = 0; ax < mode.dim(); ++ax)
    g[ax] = eval_axis_derivative(mode, x, ax, 1);
  return g;
}

inline double eval_laplacian(const SingularMode& mode, Point x) {
  if (const auto* pm = std::get_if<PowerMode1D>(&mode.family())) {
    const double t = detail::power1d_shift(mode, x);
    return detail::falling(pm->p, 2) * std::pow(t, pm->p - 2.0);
  }
  if (std::holds_alternative<Polynomial>(mode.family())) {
    double v = 0.0;
    for (int ax = 0; ax < mode.dim(); ++ax)
      v += eval_axis_derivative(mode, x, ax, 2);
    return v;
  }
  const auto [r, theta] = detail::polar_checked(mode, x);
  return detail::eval(detail::laplacian(detail::base_series(mode)), r, theta);
}

/// --- Bases ---------------------------------------------------------------

/// Ordered mode basis; n_low counts the low-regularity (singular) modes and
/// n_regular the regular ones, in that order.
struct ModeBasis {
  std::vector<SingularMode> modes;
  int n_low = 0;
  int n_regular = 0;

  static ModeBasis of(std::vector<SingularMode> modes) {
    ModeBasis b;
    for (const auto& m : modes) (m.singular() ? b.n_low : b.n_regular)++;
    b.modes = std::move(modes);
    return b;
  }
  std::size_t size() const { return modes.size(); }
};

/// A basis with a fixed coefficient vector attached.
struct ModeExpansion {
  ModeBasis basis;
  std::vector<double> k;

  ModeExpansion(ModeBasis b, std::vector<double> coeffs)
      : basis(std::move(b)), k(std::move(coeffs)) {
    if (k.size() != basis.size())
      throw DimensionMismatch("ModeExpansion: coefficient count != mode count");
  }

  double value(Point x) const {
    double v = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i)
      v += k[i] * eval_value(basis.modes[i], x);
    return v;
  }
};

struct IndependenceCheck {
  bool ok;
  double min_singular_value_ratio;
};

/// Numerical linear-independence proxy: SVD of the sample matrix
/// M[s][m] = mode_m(point_s); ok iff sigma_min / sigma_max > 1e-8.
inline IndependenceCheck check_basis_independence(
    const ModeBasis& basis, std::span<const Point> sample_points) {
  const std::size_t m = basis.size();
  if (m == 0) throw ValidationError("check_basis_independence: empty basis");
  if (sample_points.size() < 2 * m)
    throw ValidationError(
        "check_basis_independence: need at least 2x modeCount sample points");
  for (const Point& p : sample_points)
    for (const auto& mode : basis.modes)
      if (mode.singular() && p[0] == mode.center()[0] &&
          p[1] == mode.center()[1])
        throw ValidationError(
            "check_basis_independence: sample point at a mode center");

  Eigen::MatrixXd M(static_cast<Eigen::Index>(sample_points.size()),
                    static_cast<Eigen::Index>(m));
  for (std::size_t s = 0; s < sample_points.size(); ++s)
    for (std::size_t c = 0; c < m; ++c)
      M(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(c)) =
          eval_value(basis.modes[c], sample_points[s]);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  const double ratio = smax > 0.0 ? smin / smax : 0.0;
  return {ratio > 1e-8, ratio};
}

}  // namespace modesub
