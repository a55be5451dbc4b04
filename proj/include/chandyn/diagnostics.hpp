#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "chandyn/core_state.hpp"
#include "chandyn/solver.hpp"

namespace chandyn {

namespace detail {

// Continuous extension of a log(a) at a = 0; tiny negatives (rounding) count
// as zero.
template <typename Scalar>
Scalar xlogx(Scalar a) {
  using std::log;
  return a > Scalar(0) ? a * log(a) : Scalar(0);
}

}  // namespace detail

/// Entropy S = integral of theta+ log theta+ + theta- log theta- (midpoint
/// rule on the cells, 0 log 0 := 0).
template <typename Scalar>
Scalar entropy(const DensityPair<Scalar>& d) {
  Scalar acc = 0;
  const Index n = d.grid.n_cells;
  for (Index i = 0; i < n; ++i) {
    acc += detail::xlogx(d.theta_plus(i)) + detail::xlogx(d.theta_minus(i));
  }
  return d.grid.dx * acc;
}

/// The a-priori ceiling S(0) + tau^2 t / 2.
template <typename Scalar>
Scalar entropy_bound(Scalar S0, Scalar tau, Scalar t) {
  if (t < Scalar(0)) throw std::invalid_argument("entropy_bound: t must be >= 0");
  return S0 + tau * tau * t / Scalar(2);
}

/// Integral of kappa_x log kappa_x = (theta+ + theta-) log(theta+ + theta-).
template <typename Scalar>
Scalar kx_log_control(const DensityPair<Scalar>& d) {
  Scalar acc = 0;
  const Index n = d.grid.n_cells;
  for (Index i = 0; i < n; ++i) {
    acc += detail::xlogx(d.theta_plus(i) + d.theta_minus(i));
  }
  return d.grid.dx * acc;
}

/// (x+y) log(x+y) <= x log x + y log y + x log 2 + y, for all x, y > 0.
template <typename Scalar>
bool log_sum_inequality_check(Scalar x, Scalar y) {
  if (!(x > Scalar(0) && y > Scalar(0))) {
    throw std::invalid_argument("log_sum_inequality_check: need x, y > 0");
  }
  using std::log;
  const Scalar lhs = (x + y) * log(x + y);
  const Scalar rhs = x * log(x) + y * log(y) + x * log(Scalar(2)) + y;
  return lhs <= rhs;
}

/// Back stress (theta+ - theta-)_x / (theta+ + theta-) at the n-1 interior
/// faces: centered cell difference over the arithmetic face mean.
template <typename Scalar>
ArrayX<Scalar> back_stress(const DensityPair<Scalar>& d,
                           Scalar floor = Scalar(1e-12)) {
  const Index n = d.grid.n_cells;
  const ArrayX<Scalar> diff = d.theta_plus - d.theta_minus;
  const ArrayX<Scalar> total = d.theta_plus + d.theta_minus;
  ArrayX<Scalar> face_mean =
      Scalar(0.5) * (total.head(n - 1) + total.tail(n - 1));
  if (face_mean.minCoeff() < floor) {
    throw NumericalError("back_stress: total density below floor");
  }
  return ((diff.tail(n - 1) - diff.head(n - 1)) / d.grid.dx / face_mean)
      .eval();
}

/// A = rho_x - tau kappa at the nodes (centered gradient, one-sided ends).
template <typename Scalar>
ArrayX<Scalar> a_field(const ChannelState<Scalar>& s, Scalar tau) {
  return (nodal_gradient(s.rho, s.grid.dx) - tau * s.kappa).eval();
}

/// Sup-norm residual of A_t = (1+eps) A_xx - (tau rho_x / kappa_x) A_x over
/// the interior nodes (two cells in from each wall) and the interior snapshot
/// times of the trajectory. Time derivative by 3-point differencing of the
/// snapshots (non-uniform spacing supported); space derivatives centered.
template <typename Scalar>
Scalar a_residual(const std::vector<DensityPair<Scalar>>& snapshots,
                  Scalar tau, Scalar epsilon, Scalar floor = Scalar(1e-12)) {
  if (snapshots.size() < 3) {
    throw std::invalid_argument("a_residual: need at least 3 snapshots");
  }
  const Index n = snapshots.front().grid.n_cells;
  const Scalar dx = snapshots.front().grid.dx;

  std::vector<ArrayX<Scalar>> A, rx, kx;
  std::vector<Scalar> times;
  for (const auto& snap : snapshots) {
    const ChannelState<Scalar> s = reconstruct_profiles(snap);
    A.push_back(a_field(s, tau));
    rx.push_back(nodal_gradient(s.rho, dx));
    kx.push_back(nodal_gradient(s.kappa, dx));
    times.push_back(snap.time);
  }

  Scalar worst = 0;
  for (std::size_t k = 1; k + 1 < A.size(); ++k) {
    const Scalar h1 = times[k] - times[k - 1];
    const Scalar h2 = times[k + 1] - times[k];
    if (!(h1 > Scalar(0) && h2 > Scalar(0))) {
      throw std::invalid_argument("a_residual: snapshot times must increase");
    }
    for (Index j = 2; j <= n - 2; ++j) {
      const Scalar at = (h1 * h1 * A[k + 1](j) +
                         (h2 * h2 - h1 * h1) * A[k](j) -
                         h2 * h2 * A[k - 1](j)) /
                        (h1 * h2 * (h1 + h2));
      const Scalar axx =
          (A[k](j + 1) - Scalar(2) * A[k](j) + A[k](j - 1)) / (dx * dx);
      const Scalar ax = (A[k](j + 1) - A[k](j - 1)) / (Scalar(2) * dx);
      if (kx[k](j) < floor) {
        throw NumericalError("a_residual: kappa_x below floor");
      }
      const Scalar r = at - (Scalar(1) + epsilon) * axx +
                       (tau * rx[k](j) / kx[k](j)) * ax;
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

template <typename Scalar>
Scalar a_residual(const Trajectory<Scalar>& traj, Scalar tau, Scalar epsilon,
                  Scalar floor = Scalar(1e-12)) {
  return a_residual(traj.snapshots, tau, epsilon, floor);
}

/// One row of the monitored time series.
template <typename Scalar>
struct EntropyRecord {
  Scalar time{0};
  Scalar S{0};
  Scalar bound{0};           // S(0) + tau^2 t / 2
  Scalar mass_plus{0};
  Scalar mass_minus{0};
  Scalar positivity_margin{0};  // min of kappa_x - |rho_x|
  Scalar kxlogkx{0};
  Scalar kxlogkx_bound{0};   // S(0) + tau^2 t / 2 + 2
};

template <typename Scalar>
EntropyRecord<Scalar> make_entropy_record(const DensityPair<Scalar>& d,
                                          Scalar S0, Scalar tau) {
  EntropyRecord<Scalar> r;
  r.time = d.time;
  r.S = entropy(d);
  r.bound = entropy_bound(S0, tau, d.time);
  const auto m = masses(d);
  r.mass_plus = m.first;
  r.mass_minus = m.second;
  r.positivity_margin = positivity_margin(d);
  r.kxlogkx = kx_log_control(d);
  r.kxlogkx_bound = r.bound + Scalar(2);
  return r;
}

}  // namespace chandyn
