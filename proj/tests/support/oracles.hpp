// Test-side oracles, independent of the library code paths they check.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "chandyn/core_state.hpp"

namespace oracles {

using chandyn::ArrayXd;
using chandyn::Index;

/// Nodal solution of the stationary two-point BVP
///   rho'' = alpha kappa',  kappa'' = alpha rho',  alpha = tau / (1 + eps),
///   rho(-1) = 0, kappa(-1) = -1, rho(1) = 0, kappa(1) = 1,
/// by RK4 shooting on the unknown left slopes. The system is linear in the
/// slopes, so two probe integrations determine them exactly (2x2 solve).
struct ShootingResult {
  ArrayXd rho;
  ArrayXd kappa;
};

inline ShootingResult shoot_stationary(double tau, double epsilon,
                                       Index n_cells, int substeps = 8) {
  const double alpha = tau / (1.0 + epsilon);
  const Index total = n_cells * substeps;
  const double h = 2.0 / static_cast<double>(total);

  struct Y {
    double r, p, k, q;  // rho, rho', kappa, kappa'
  };
  auto deriv = [alpha](const Y& y) {
    return Y{y.p, alpha * y.q, y.q, alpha * y.p};
  };
  auto axpy = [](const Y& y, const Y& d, double s) {
    return Y{y.r + s * d.r, y.p + s * d.p, y.k + s * d.k, y.q + s * d.q};
  };

  // Integrates from x = -1 with left slopes (s1, s2); records nodal values.
  auto integrate = [&](double s1, double s2, ArrayXd* rho_out,
                       ArrayXd* kap_out) {
    Y y{0.0, s1, -1.0, s2};
    if (rho_out) {
      (*rho_out)(0) = y.r;
      (*kap_out)(0) = y.k;
    }
    for (Index i = 0; i < total; ++i) {
      const Y k1 = deriv(y);
      const Y k2 = deriv(axpy(y, k1, h / 2));
      const Y k3 = deriv(axpy(y, k2, h / 2));
      const Y k4 = deriv(axpy(y, k3, h));
      y = Y{y.r + h / 6 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r),
            y.p + h / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p),
            y.k + h / 6 * (k1.k + 2 * k2.k + 2 * k3.k + k4.k),
            y.q + h / 6 * (k1.q + 2 * k2.q + 2 * k3.q + k4.q)};
      if (rho_out && (i + 1) % substeps == 0) {
        (*rho_out)((i + 1) / substeps) = y.r;
        (*kap_out)((i + 1) / substeps) = y.k;
      }
    }
    return std::pair<double, double>{y.r, y.k};
  };

  const auto base = integrate(0.0, 0.0, nullptr, nullptr);
  const auto e1 = integrate(1.0, 0.0, nullptr, nullptr);
  const auto e2 = integrate(0.0, 1.0, nullptr, nullptr);

  Eigen::Matrix2d M;
  M << e1.first - base.first, e2.first - base.first, e1.second - base.second,
      e2.second - base.second;
  Eigen::Vector2d target(0.0 - base.first, 1.0 - base.second);
  const Eigen::Vector2d s = M.fullPivLu().solve(target);

  ShootingResult out;
  out.rho.resize(n_cells + 1);
  out.kappa.resize(n_cells + 1);
  integrate(s(0), s(1), &out.rho, &out.kappa);
  return out;
}

/// Root of h (e^{1/k} - 1/k - 1) = 1 (the Luxemburg norm of the constant
/// function 1 on (0, h) for the exponential Young function), by bisection on
/// the monotone map u = 1/k.
inline double lux_norm_of_one_root(double h) {
  auto g = [h](double u) { return h * (std::exp(u) - u - 1.0) - 1.0; };
  double lo = 1e-6, hi = 1e4;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? hi : lo) = mid;
  }
  return 1.0 / (0.5 * (lo + hi));
}

/// Entropy of the piecewise-linear reconstruction of a cell density field.
/// The slope fields are piecewise constant, so the exact integral is the sum
/// of cell contributions; evaluated here in long double with compensated
/// summation in reverse cell order (an independent numerical route).
inline double entropy_quadrature(const ArrayXd& theta_plus,
                                 const ArrayXd& theta_minus, double dx) {
  auto f = [](long double a) {
    return a > 0 ? a * std::log(a) : static_cast<long double>(0);
  };
  long double acc = 0, comp = 0;
  for (Index i = theta_plus.size() - 1; i >= 0; --i) {
    const long double term =
        static_cast<long double>(dx) *
        (f(theta_plus(i)) + f(theta_minus(i)));
    const long double y = term - comp;
    const long double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  return static_cast<double>(acc);
}

/// Continuum entropy of closed-form profiles by composite Simpson quadrature
/// of f(theta+) + f(theta-) with theta+- = (kappa_x +- rho_x)/2.
inline double entropy_continuum(const std::function<double(double)>& rho_x,
                                const std::function<double(double)>& kappa_x,
                                int panels = 20000) {
  auto f = [](double a) { return a > 0 ? a * std::log(a) : 0.0; };
  auto g = [&](double x) {
    const double kx = kappa_x(x), rx = rho_x(x);
    return f(0.5 * (kx + rx)) + f(0.5 * (kx - rx));
  };
  const double h = 2.0 / panels;
  double acc = g(-1.0) + g(1.0);
  for (int i = 1; i < panels; ++i) {
    acc += (i % 2 ? 4.0 : 2.0) * g(-1.0 + i * h);
  }
  return acc * h / 3.0;
}

/// Caloric polynomials u_t = u_xx of degree <= 4 with their exact values.
inline std::vector<std::function<double(double, double)>> caloric_polys() {
  return {
      [](double, double) { return 1.0; },
      [](double x, double) { return x; },
      [](double x, double t) { return x * x + 2 * t; },
      [](double x, double t) { return x * x * x + 6 * x * t; },
      [](double x, double t) {
        return x * x * x * x + 12 * x * x * t + 12 * t * t;
      },
  };
}

/// Random admissible cell densities with unit masses: positive thetas drawn
/// log-uniformly, then rescaled so each species integrates to one.
inline void random_unit_densities(std::mt19937_64& rng, Index n, double dx,
                                  ArrayXd& tp, ArrayXd& tm) {
  std::uniform_real_distribution<double> u(-2.0, 1.0);
  tp.resize(n);
  tm.resize(n);
  for (Index i = 0; i < n; ++i) {
    tp(i) = std::pow(10.0, u(rng));
    tm(i) = std::pow(10.0, u(rng));
  }
  tp /= tp.sum() * dx;
  tm /= tm.sum() * dx;
}

}  // namespace oracles
