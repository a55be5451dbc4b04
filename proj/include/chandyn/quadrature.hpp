#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace chandyn {

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence (deterministic, accurate to rounding).
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) {
    if (n < 1) throw std::invalid_argument("GaussLegendre: n must be >= 1");
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      weights[i] = w;
      weights[n - 1 - i] = w;
    }
  }
};

/// Panels of (a, b) refined dyadically toward both endpoints (where the
/// integrands below lose smoothness); interior panels bisect toward the
/// midpoint. The remaining slivers of width (b-a) 2^-levels at each end are
/// included as ordinary panels.
inline std::vector<std::pair<double, double>> dyadic_panels(double a, double b,
                                                            int levels) {
  const double mid = 0.5 * (a + b);
  std::vector<std::pair<double, double>> out;
  double prev = a + (mid - a) * std::ldexp(1.0, -levels);
  out.emplace_back(a, prev);
  for (int k = levels - 1; k >= 0; --k) {
    const double nxt = a + (mid - a) * std::ldexp(1.0, -k);
    out.emplace_back(prev, nxt);
    prev = nxt;
  }
  for (int k = 1; k <= levels; ++k) {
    const double nxt = b - (b - mid) * std::ldexp(1.0, -k);
    out.emplace_back(prev, nxt);
    prev = nxt;
  }
  out.emplace_back(prev, b);
  return out;
}

/// Composite Gauss-Legendre over dyadically refined panels.
template <typename F>
double integrate_dyadic(const F& f, double a, double b, int levels,
                        const GaussLegendre& gl) {
  double total = 0;
  for (const auto& [lo, hi] : dyadic_panels(a, b, levels)) {
    if (!(hi > lo)) continue;
    const double c = 0.5 * (lo + hi);
    const double s = 0.5 * (hi - lo);
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      total += s * gl.weights[q] * f(c + s * gl.nodes[q]);
    }
  }
  return total;
}

}  // namespace chandyn
