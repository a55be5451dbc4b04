#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace chandyn {

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

using ArrayXd = ArrayX<double>;
using Index = Eigen::Index;

/// Thrown when a computation leaves the admissible regime (NaN, negative
/// density beyond tolerance, density floor breached, non-convergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tolerance used for all theta >= 0 checks.
inline constexpr double kPositivityTol = 1e-12;

/// Uniform nodal mesh on [-1, 1]: n_cells + 1 nodes, spacing dx = 2 / n_cells.
template <typename Scalar>
struct Grid {
  Index n_cells{0};
  ArrayX<Scalar> nodes;
  Scalar dx{0};

  ArrayX<Scalar> cell_centers() const {
    return (Scalar(0.5) * (nodes.head(n_cells) + nodes.tail(n_cells))).eval();
  }
};

template <typename Scalar = double>
Grid<Scalar> build_grid(Index n_cells) {
  if (n_cells < 4) {
    throw std::invalid_argument("build_grid: n_cells must be >= 4, got " +
                                std::to_string(n_cells));
  }
  Grid<Scalar> g;
  g.n_cells = n_cells;
  g.dx = Scalar(2) / Scalar(n_cells);
  g.nodes = ArrayX<Scalar>::LinSpaced(n_cells + 1, Scalar(-1), Scalar(1));
  return g;
}

/// Integrated profiles at one time instant, stored at the nodes.
/// Anchors: rho(+-1) = 0, kappa(+-1) = +-1. Admissibility: on every cell the
/// forward differences satisfy d(kappa) >= |d(rho)| up to tolerance.
template <typename Scalar>
struct ChannelState {
  Grid<Scalar> grid;
  ArrayX<Scalar> rho;
  ArrayX<Scalar> kappa;
  Scalar time{0};
};

/// Signed density fields theta+ / theta-, cell averaged; the conserved
/// unknowns of the scheme. Both non-negative, each of unit mass on [-1, 1].
template <typename Scalar>
struct DensityPair {
  Grid<Scalar> grid;
  ArrayX<Scalar> theta_plus;
  ArrayX<Scalar> theta_minus;
  Scalar time{0};
};

/// Checks the ChannelState invariants; throws std::invalid_argument naming the
/// first violation.
template <typename Scalar>
void check_state(const ChannelState<Scalar>& s,
                 Scalar tol = Scalar(kPositivityTol)) {
  const Index n = s.grid.n_cells;
  if (s.rho.size() != n + 1 || s.kappa.size() != n + 1) {
    throw std::invalid_argument("check_state: profile sizes do not match grid");
  }
  const Scalar anchor_tol = std::max(tol, Scalar(1e-9));
  using std::abs;
  if (abs(s.rho(0)) > anchor_tol || abs(s.rho(n)) > anchor_tol) {
    throw std::invalid_argument("check_state: rho(+-1) = 0 violated");
  }
  if (abs(s.kappa(0) + Scalar(1)) > anchor_tol ||
      abs(s.kappa(n) - Scalar(1)) > anchor_tol) {
    throw std::invalid_argument("check_state: kappa(+-1) = +-1 violated");
  }
  const ArrayX<Scalar> dk = s.kappa.tail(n) - s.kappa.head(n);
  const ArrayX<Scalar> dr = s.rho.tail(n) - s.rho.head(n);
  if (((dk - dr.abs()).minCoeff()) < -tol * s.grid.dx * 2) {
    throw std::invalid_argument(
        "check_state: slope condition d(kappa) >= |d(rho)| violated");
  }
}

/// theta+- = (d(kappa) +- d(rho)) / (2 dx) per cell. Signals (NumericalError)
/// if the state carries negative density beyond tolerance.
template <typename Scalar>
DensityPair<Scalar> derive_densities(const ChannelState<Scalar>& state,
                                     Scalar tol = Scalar(kPositivityTol)) {
  const Index n = state.grid.n_cells;
  const Scalar inv = Scalar(1) / (Scalar(2) * state.grid.dx);
  DensityPair<Scalar> d;
  d.grid = state.grid;
  d.time = state.time;
  const ArrayX<Scalar> dk = state.kappa.tail(n) - state.kappa.head(n);
  const ArrayX<Scalar> dr = state.rho.tail(n) - state.rho.head(n);
  d.theta_plus = (dk + dr) * inv;
  d.theta_minus = (dk - dr) * inv;
  const Scalar mn = std::min(d.theta_plus.minCoeff(), d.theta_minus.minCoeff());
  if (mn < -tol) {
    throw NumericalError("derive_densities: negative density " +
                         std::to_string(static_cast<double>(mn)) +
                         " (state violates kappa_x >= |rho_x|)");
  }
  return d;
}

/// Inverse map: cumulative integration of the cell slopes anchored at
/// rho(-1) = 0, kappa(-1) = -1. Signals mass drift when the reconstructed
/// right-end values miss kappa(1) = 1 or rho(1) = 0 by more than mass_tol
/// (equivalent to the theta masses deviating from one).
template <typename Scalar>
ChannelState<Scalar> reconstruct_profiles(const DensityPair<Scalar>& densities,
                                          Scalar mass_tol = Scalar(1e-8)) {
  const Index n = densities.grid.n_cells;
  const Scalar dx = densities.grid.dx;
  ChannelState<Scalar> s;
  s.grid = densities.grid;
  s.time = densities.time;
  s.rho.resize(n + 1);
  s.kappa.resize(n + 1);
  s.rho(0) = Scalar(0);
  s.kappa(0) = Scalar(-1);
  for (Index i = 0; i < n; ++i) {
    const Scalar tp = densities.theta_plus(i);
    const Scalar tm = densities.theta_minus(i);
    s.rho(i + 1) = s.rho(i) + dx * (tp - tm);
    s.kappa(i + 1) = s.kappa(i) + dx * (tp + tm);
  }
  using std::abs;
  if (abs(s.kappa(n) - Scalar(1)) > mass_tol ||
      abs(s.rho(n)) > mass_tol) {
    throw NumericalError(
        "reconstruct_profiles: mass drift, kappa(1) = " +
        std::to_string(static_cast<double>(s.kappa(n))) + ", rho(1) = " +
        std::to_string(static_cast<double>(s.rho(n))));
  }
  return s;
}

/// Midpoint-rule masses of theta+ and theta- over [-1, 1].
template <typename Scalar>
std::pair<Scalar, Scalar> masses(const DensityPair<Scalar>& d) {
  return {d.grid.dx * d.theta_plus.sum(), d.grid.dx * d.theta_minus.sum()};
}

/// min over cells of kappa_x - |rho_x| = 2 min(theta+, theta-).
template <typename Scalar>
Scalar positivity_margin(const DensityPair<Scalar>& d) {
  return Scalar(2) *
         std::min(d.theta_plus.minCoeff(), d.theta_minus.minCoeff());
}

/// Second-order nodal gradient: centered in the interior, one-sided 3-point
/// stencils at the two end nodes.
template <typename Scalar>
ArrayX<Scalar> nodal_gradient(const ArrayX<Scalar>& u, Scalar dx) {
  const Index m = u.size();
  if (m < 3) throw std::invalid_argument("nodal_gradient: need >= 3 nodes");
  ArrayX<Scalar> g(m);
  const Scalar half = Scalar(1) / (Scalar(2) * dx);
  g.segment(1, m - 2) = (u.tail(m - 2) - u.head(m - 2)) * half;
  g(0) = (Scalar(-3) * u(0) + Scalar(4) * u(1) - u(2)) * half;
  g(m - 1) = (Scalar(3) * u(m - 1) - Scalar(4) * u(m - 2) + u(m - 3)) * half;
  return g;
}

/// Cumulative trapezoid of nodal values from the left end; result(0) = 0.
template <typename Scalar>
ArrayX<Scalar> cumulative_trapezoid(const ArrayX<Scalar>& u, Scalar dx) {
  const Index m = u.size();
  ArrayX<Scalar> out(m);
  out(0) = Scalar(0);
  for (Index i = 1; i < m; ++i) {
    out(i) = out(i - 1) + Scalar(0.5) * dx * (u(i - 1) + u(i));
  }
  return out;
}

}  // namespace chandyn
