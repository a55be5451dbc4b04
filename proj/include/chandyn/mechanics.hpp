#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

#include "chandyn/core_state.hpp"

namespace chandyn {

template <typename Scalar>
struct MechanicsConfig {
  Scalar mu{1};      // Lame shear modulus, > 0
  Scalar lambda{0};  // Lame first parameter; cancels in the closed forms,
                     // stored for completeness and echoed in manifests
  Scalar tau{0};
};

template <typename Scalar>
void check_mechanics(const MechanicsConfig<Scalar>& c) {
  if (!(c.mu > Scalar(0))) {
    throw std::invalid_argument("MechanicsConfig: mu must be > 0");
  }
  if (!(c.lambda >= Scalar(0))) {
    throw std::invalid_argument("MechanicsConfig: lambda must be >= 0");
  }
}

/// Plastic strain of the single slip system: off-diagonal entries rho/2.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> plastic_strain(Scalar rho_value) {
  Eigen::Matrix<Scalar, 2, 2> e;
  e << Scalar(0), rho_value / Scalar(2), rho_value / Scalar(2), Scalar(0);
  return e;
}

/// u2(x1) = (tau/mu) x1 + integral of rho from 0 to x1 (trapezoid on the
/// nodal samples, split exactly at x = 0 when 0 is not a node). u2(0) = 0.
template <typename Scalar>
ArrayX<Scalar> displacement_profile(const Grid<Scalar>& grid,
                                    const ArrayX<Scalar>& rho,
                                    const MechanicsConfig<Scalar>& config) {
  check_mechanics(config);
  if (rho.size() != grid.n_cells + 1) {
    throw std::invalid_argument("displacement_profile: rho size mismatch");
  }
  const ArrayX<Scalar> cum = cumulative_trapezoid(rho, grid.dx);
  // Trapezoid value of the integral from -1 to 0.
  Scalar at_zero;
  if (grid.n_cells % 2 == 0) {
    at_zero = cum(grid.n_cells / 2);
  } else {
    const Index i = grid.n_cells / 2;  // cell containing 0
    const Scalar xl = grid.nodes(i);
    const Scalar w = -xl;  // distance from node i to 0, in (0, dx)
    const Scalar rho_mid =
        rho(i) + (rho(i + 1) - rho(i)) * (w / grid.dx);
    at_zero = cum(i) + Scalar(0.5) * w * (rho(i) + rho_mid);
  }
  return (config.tau / config.mu) * grid.nodes + (cum - at_zero);
}

/// Closed-form stationary profiles of the eps-regularized system. With
/// alpha = tau / (1 + eps) and B = 1 / sinh(alpha):
///   rho(x) = B (cosh(alpha x) - cosh(alpha)),   kappa(x) = B sinh(alpha x).
/// The kappa component must carry the x argument: the x-independent variant
/// B sinh(alpha) cannot satisfy both kappa(-1) = -1 and kappa(1) = 1. The
/// pair above is the unique solution of the stationary two-point BVP
///   rho_xx = alpha kappa_x,  kappa_xx = alpha rho_x,
///   rho(+-1) = 0, kappa(+-1) = +-1,
/// and is cross-checked against a shooting oracle in the test suite.
/// tau = 0 returns the trivial stationary state rho = 0, kappa(x) = x.
template <typename Scalar>
ChannelState<Scalar> stationary_profile(Scalar tau, Scalar epsilon,
                                        const Grid<Scalar>& grid) {
  if (!(epsilon >= Scalar(0))) {
    throw std::invalid_argument("stationary_profile: epsilon must be >= 0");
  }
  ChannelState<Scalar> s;
  s.grid = grid;
  s.time = Scalar(0);
  if (tau == Scalar(0)) {
    s.rho = ArrayX<Scalar>::Zero(grid.n_cells + 1);
    s.kappa = grid.nodes;
    return s;
  }
  using std::cosh;
  using std::sinh;
  const Scalar alpha = tau / (Scalar(1) + epsilon);
  const Scalar B = Scalar(1) / sinh(alpha);
  s.rho = B * ((alpha * grid.nodes).cosh() - cosh(alpha));
  s.kappa = B * (alpha * grid.nodes).sinh();
  return s;
}

/// Long-time displacement in closed form:
///   u2(x1) = (tau/mu - coth tau) x1 + sinh(tau x1) / (tau sinh tau).
template <typename Scalar>
Scalar longtime_displacement(Scalar x1, const MechanicsConfig<Scalar>& config) {
  check_mechanics(config);
  if (config.tau == Scalar(0)) {
    throw std::domain_error(
        "longtime_displacement: tau = 0 is degenerate (zero stress relaxes to "
        "the undeformed state)");
  }
  using std::cosh;
  using std::sinh;
  const Scalar t = config.tau;
  return (t / config.mu - cosh(t) / sinh(t)) * x1 + sinh(t * x1) / (t * sinh(t));
}

/// Reference lattice on [-1,1] x [0, height] displaced by (0, u2(x1)).
template <typename Scalar>
struct DeformedMesh {
  ArrayX<Scalar> x1;  // cols stations
  ArrayX<Scalar> x2;  // rows levels
  ArrayX<Scalar> u2;  // vertical displacement per station; u1 == 0
};

template <typename Scalar>
DeformedMesh<Scalar> deformed_mesh(const Grid<Scalar>& grid,
                                   const ArrayX<Scalar>& rho,
                                   const MechanicsConfig<Scalar>& config,
                                   Index rows, Index cols,
                                   Scalar height = Scalar(1)) {
  if (rows < 2 || cols < 2) {
    throw std::invalid_argument("deformed_mesh: rows and cols must be >= 2");
  }
  const ArrayX<Scalar> u2_nodes = displacement_profile(grid, rho, config);
  DeformedMesh<Scalar> m;
  m.x1 = ArrayX<Scalar>::LinSpaced(cols, Scalar(-1), Scalar(1));
  m.x2 = ArrayX<Scalar>::LinSpaced(rows, Scalar(0), height);
  m.u2.resize(cols);
  for (Index i = 0; i < cols; ++i) {
    const Scalar q = m.x1(i);
    Index c = static_cast<Index>(double((q + Scalar(1)) / grid.dx));
    c = std::min(std::max<Index>(c, 0), grid.n_cells - 1);
    const Scalar w = (q - grid.nodes(c)) / grid.dx;
    m.u2(i) = (Scalar(1) - w) * u2_nodes(c) + w * u2_nodes(c + 1);
  }
  return m;
}

}  // namespace chandyn
