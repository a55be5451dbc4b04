#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "chandyn/core_state.hpp"
#include "chandyn/quadrature.hpp"

namespace chandyn {

/// Modified parabolic ball
///   t0 - r^2 < t < t0,  (x - x0)^2 < 8 (t0 - t) log(r^2 / (t0 - t)).
/// Its 2-D measure is c_bar r^3 with a center-independent constant c_bar.
struct ParabolicBall {
  double x0{0};
  double t0{0};
  double r{1};

  ParabolicBall(double x0_, double t0_, double r_) : x0(x0_), t0(t0_), r(r_) {
    if (!(r > 0)) throw std::invalid_argument("ParabolicBall: r must be > 0");
  }

  /// Half-width of the t-slice; zero outside (t0 - r^2, t0).
  double half_width(double t) const {
    const double s = t0 - t;
    if (!(s > 0 && s < r * r)) return 0;
    const double w2 = 8.0 * s * std::log(r * r / s);
    return w2 > 0 ? std::sqrt(w2) : 0;
  }

  bool contains(double x, double t) const {
    const double s = t0 - t;
    if (!(s > 0 && s < r * r)) return false;
    const double w = x - x0;
    return w * w < 8.0 * s * std::log(r * r / s);
  }
};

/// 2-D measure of the ball by t-slice quadrature (dyadic panels toward the
/// two slice-collapse ends, Gauss-Legendre inside).
inline double ball_measure(double r, int levels = 42, int gl_points = 20) {
  if (!(r > 0)) throw std::invalid_argument("ball_measure: r must be > 0");
  const GaussLegendre gl(gl_points);
  const double r2 = r * r;
  auto width = [r2](double s) {
    const double w2 = 8.0 * s * std::log(r2 / s);
    return w2 > 0 ? 2.0 * std::sqrt(w2) : 0.0;
  };
  return integrate_dyadic(width, 0.0, r2, levels, gl);
}

/// Bounded representation kernel on the unit ball centered at the origin
/// (so -1 < t < 0 and R = -x^2 + 8 t log(-t) >= 0):
///   E(x,t) = (w3 / 16 pi^2) R^{3/2} [ x^2/(4t^2) + 3R/(20 t^2) ],
/// w3 the volume of the unit ball in R^3. Non-negative, vanishes on the
/// lateral boundary, bounded on the whole ball.
inline double kernel_E(double x, double t) {
  if (!(t < 0 && t > -1)) {
    throw std::domain_error("kernel_E: t must lie in (-1, 0)");
  }
  const double R = -x * x + 8.0 * t * std::log(-t);
  if (R < 0) {
    throw std::domain_error("kernel_E: point outside the unit parabolic ball");
  }
  const double w3 = 4.0 * M_PI / 3.0;
  return w3 / (16.0 * M_PI * M_PI) * R * std::sqrt(R) *
         (x * x / (4.0 * t * t) + 3.0 * R / (20.0 * t * t));
}

namespace detail {

/// Quadrature of (1/r^3) integral of u(x,t) E((x-x0)/r, (t-t0)/r^2) over the
/// ball. In scaled slice coordinates t = t0 + r^2 sigma, x = x0 + r W sin(phi)
/// with W the slice half-width, the kernel factor becomes W^4 cos^4(phi)
/// times a polynomial in sin/cos, so each slice integrand is smooth and the
/// only delicate direction is sigma near its two ends.
inline double mean_value_quad(const std::function<double(double, double)>& u,
                              double x0, double t0, double r, int levels,
                              int gl_t, int gl_phi) {
  const GaussLegendre glt(gl_t);
  const GaussLegendre glp(gl_phi);
  const double w3 = 4.0 * M_PI / 3.0;
  const double front = w3 / (16.0 * M_PI * M_PI);
  double total = 0;
  for (const auto& [lo, hi] : dyadic_panels(-1.0, 0.0, levels)) {
    if (!(hi > lo)) continue;
    const double c = 0.5 * (lo + hi);
    const double sc = 0.5 * (hi - lo);
    for (std::size_t qt = 0; qt < glt.nodes.size(); ++qt) {
      const double sigma = c + sc * glt.nodes[qt];
      if (!(sigma > -1.0 && sigma < 0.0)) continue;
      const double W2 = 8.0 * sigma * std::log(-sigma);
      if (!(W2 > 0)) continue;
      const double W = std::sqrt(W2);
      double slice = 0;
      for (std::size_t qp = 0; qp < glp.nodes.size(); ++qp) {
        const double phi = 0.5 * M_PI * glp.nodes[qp];
        const double cp = std::cos(phi);
        const double xi = W * std::sin(phi);
        const double R = W2 - xi * xi;
        const double ker = front * (W * cp) * (W * cp) * (W * cp) *
                           (xi * xi / (4.0 * sigma * sigma) +
                            3.0 * R / (20.0 * sigma * sigma));
        slice += 0.5 * M_PI * glp.weights[qp] * ker * W * cp *
                 u(x0 + r * xi, t0 + r * r * sigma);
      }
      total += sc * glt.weights[qt] * slice;
    }
  }
  return total;
}

}  // namespace detail

/// Mean value of a caloric function over the modified parabolic ball:
///   u(x0, t0) = (c_bar / |ball|) integral of u E(scaled) over the ball.
/// c_bar is obtained from ball_measure(1) (never hard-coded) and |ball| from
/// ball_measure(r). The quadrature is evaluated at two refinements; if the
/// two estimates disagree beyond 1e-6 (relative to the coarser magnitude),
/// a NumericalError reports both.
inline double mean_value(const std::function<double(double, double)>& u,
                         double x0, double t0, double r) {
  if (!(r > 0)) throw std::invalid_argument("mean_value: r must be > 0");
  static const double c_bar = ball_measure(1.0);
  const double scale = c_bar / ball_measure(r);  // = 1/r^3 up to quadrature
  const double coarse =
      scale * r * r * r * detail::mean_value_quad(u, x0, t0, r, 30, 12, 16);
  const double fine =
      scale * r * r * r * detail::mean_value_quad(u, x0, t0, r, 40, 16, 24);
  const double diff = std::abs(fine - coarse);
  if (diff > 1e-6 * std::max(1.0, std::abs(coarse))) {
    throw NumericalError(
        "mean_value: quadrature not converged, estimates " +
        std::to_string(coarse) + " and " + std::to_string(fine) +
        " differ by " + std::to_string(diff));
  }
  return fine;
}

}  // namespace chandyn
