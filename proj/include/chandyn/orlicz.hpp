#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "chandyn/core_state.hpp"

namespace chandyn {

/// The complementary Young pair used throughout:
///   psi(s) = (1+s) log(1+s) - s   and   phi_star(s) = e^s - s - 1.
template <typename Scalar>
Scalar young_psi(Scalar s) {
  using std::log;
  return (Scalar(1) + s) * log(Scalar(1) + s) - s;
}

template <typename Scalar>
Scalar young_phi_star(Scalar s) {
  using std::exp;
  return exp(s) - s - Scalar(1);
}

template <typename Scalar>
struct YoungPair {
  std::function<Scalar(Scalar)> psi = [](Scalar s) { return young_psi(s); };
  std::function<Scalar(Scalar)> phi_star = [](Scalar s) {
    return young_phi_star(s);
  };
};

/// Function on (a, b) sampled at the midpoints of a uniform partition into
/// values.size() cells; integrals below are composite midpoint sums.
template <typename Scalar>
struct SampledFunction {
  Scalar a{0};
  Scalar b{1};
  ArrayX<Scalar> values;

  Scalar h() const { return (b - a) / Scalar(values.size()); }
};

template <typename Scalar>
SampledFunction<Scalar> constant_function(Scalar a, Scalar b, Scalar value,
                                          Index cells = 64) {
  return {a, b, ArrayX<Scalar>::Constant(cells, value)};
}

namespace detail {

// Midpoint integral of young(|u|/k); +inf when the evaluation overflows.
template <typename Scalar>
Scalar modular_integral(const SampledFunction<Scalar>& u,
                        const std::function<Scalar(Scalar)>& young,
                        Scalar k) {
  Scalar acc = 0;
  for (Index i = 0; i < u.values.size(); ++i) {
    const Scalar y = young(std::abs(u.values(i)) / k);
    if (!std::isfinite(double(y))) {
      return std::numeric_limits<Scalar>::infinity();
    }
    acc += y;
  }
  return u.h() * acc;
}

}  // namespace detail

/// Luxemburg norm inf{ k > 0 : integral of young(|u|/k) <= 1 } by bisection.
/// The modular is strictly decreasing in k (u not identically zero), so the
/// crossing is unique; absolute tolerance 1e-10 on k. Signals when no k up to
/// 1e14 brings the modular below one (u outside the Orlicz class numerically).
template <typename Scalar>
Scalar luxemburg_norm(const SampledFunction<Scalar>& u,
                      const std::function<Scalar(Scalar)>& young) {
  if (u.values.size() == 0 || !(u.b > u.a)) {
    throw std::invalid_argument("luxemburg_norm: degenerate sample interval");
  }
  if (!u.values.allFinite()) {
    throw std::invalid_argument("luxemburg_norm: non-finite samples");
  }
  if (u.values.abs().maxCoeff() == Scalar(0)) return Scalar(0);

  Scalar hi = Scalar(1e-14);
  while (detail::modular_integral(u, young, hi) > Scalar(1)) {
    hi *= Scalar(2);
    if (hi > Scalar(1e14)) {
      throw NumericalError(
          "luxemburg_norm: modular stays above one up to k = 1e14");
    }
  }
  if (hi == Scalar(1e-14)) return hi;
  Scalar lo = hi / Scalar(2);
  while (hi - lo > Scalar(1e-10)) {
    const Scalar mid = Scalar(0.5) * (lo + hi);
    (detail::modular_integral(u, young, mid) <= Scalar(1) ? hi : lo) = mid;
  }
  return Scalar(0.5) * (lo + hi);
}

template <typename Scalar>
struct NormControlResult {
  Scalar norm{0};
  Scalar bound{0};
  bool ok{false};
};

/// ||u||_psi <= 1 + integral of psi(|u|).
template <typename Scalar>
NormControlResult<Scalar> norm_control_check(
    const SampledFunction<Scalar>& u,
    const std::function<Scalar(Scalar)>& young) {
  NormControlResult<Scalar> r;
  r.norm = luxemburg_norm(u, young);
  Scalar acc = 0;
  for (Index i = 0; i < u.values.size(); ++i) {
    acc += young(std::abs(u.values(i)));
  }
  r.bound = Scalar(1) + u.h() * acc;
  r.ok = r.norm <= r.bound + Scalar(1e-9);
  return r;
}

template <typename Scalar>
struct HolderResult {
  Scalar lhs{0};
  Scalar rhs{0};
  bool ok{false};
};

/// |integral of u v| <= 2 ||u||_psi ||v||_phi*. Both functions must be
/// sampled on the same partition.
template <typename Scalar>
HolderResult<Scalar> holder_check(const SampledFunction<Scalar>& u,
                                  const SampledFunction<Scalar>& v,
                                  const YoungPair<Scalar>& pair) {
  if (u.values.size() != v.values.size() || u.a != v.a || u.b != v.b) {
    throw std::invalid_argument("holder_check: mismatched sample partitions");
  }
  HolderResult<Scalar> r;
  r.lhs = std::abs(u.h() * (u.values * v.values).sum());
  r.rhs = Scalar(2) * luxemburg_norm(u, pair.psi) *
          luxemburg_norm(v, pair.phi_star);
  r.ok = r.lhs <= r.rhs + Scalar(1e-9);
  return r;
}

template <typename Scalar>
struct LogModulusResult {
  Scalar max_increment{0};
  Scalar bound{0};
  bool ok{false};
};

/// For an increasing nodal function with entropy of the slope bounded by c1,
/// every increment over a lag h < 1 obeys
///   |u(x+h) - u(x)| <= 2 (c1 + 1 + log 2) / |log h|.
/// Increments are taken from every node, linearly interpolating at x + h.
template <typename Scalar>
LogModulusResult<Scalar> log_modulus_bound(const ArrayX<Scalar>& x,
                                           const ArrayX<Scalar>& v, Scalar c1,
                                           Scalar h) {
  const Index m = x.size();
  if (m < 2 || v.size() != m) {
    throw std::invalid_argument("log_modulus_bound: need matching nodal arrays");
  }
  if (!(h > Scalar(0) && h < Scalar(1))) {
    throw std::invalid_argument(
        "log_modulus_bound: h must lie in (0, 1), the bound is vacuous otherwise");
  }
  for (Index i = 1; i < m; ++i) {
    if (v(i) < v(i - 1)) {
      throw std::invalid_argument("log_modulus_bound: u must be non-decreasing");
    }
  }
  auto interp = [&](Scalar q) -> Scalar {
    if (q <= x(0)) return v(0);
    if (q >= x(m - 1)) return v(m - 1);
    Index lo = 0, hi = m - 1;
    while (hi - lo > 1) {
      const Index mid = (lo + hi) / 2;
      (x(mid) <= q ? lo : hi) = mid;
    }
    const Scalar w = (q - x(lo)) / (x(lo + 1) - x(lo));
    return (Scalar(1) - w) * v(lo) + w * v(lo + 1);
  };
  LogModulusResult<Scalar> r;
  using std::log;
  r.bound = Scalar(2) * (c1 + Scalar(1) + log(Scalar(2))) / (-log(h));
  for (Index i = 0; i < m; ++i) {
    if (x(i) + h > x(m - 1)) break;
    r.max_increment =
        std::max(r.max_increment, std::abs(interp(x(i) + h) - v(i)));
  }
  r.ok = r.max_increment <= r.bound + Scalar(1e-12);
  return r;
}

}  // namespace chandyn
