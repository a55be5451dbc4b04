#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "chandyn/core_state.hpp"

namespace chandyn {

template <typename Scalar>
struct SolverConfig {
  Scalar tau{0};                 // applied stress (constant)
  Scalar epsilon{0};             // diffusive regularization, >= 0
  Scalar cfl{Scalar(0.9)};       // safety factor in (0, 1]
  Scalar kappa_x_floor{Scalar(1e-12)};  // guard on the total density
  Scalar t_end{Scalar(1)};
  Scalar steady_tol{Scalar(1e-8)};      // on max|d theta / dt|
  Scalar max_steady_time{Scalar(200)};  // give up beyond this simulated time
};

template <typename Scalar>
void check_config(const SolverConfig<Scalar>& c) {
  if (!(c.epsilon >= Scalar(0))) {
    throw std::invalid_argument("SolverConfig: epsilon must be >= 0");
  }
  if (!(c.cfl > Scalar(0) && c.cfl <= Scalar(1))) {
    throw std::invalid_argument("SolverConfig: cfl must be in (0, 1]");
  }
  if (!(c.kappa_x_floor > Scalar(0))) {
    throw std::invalid_argument("SolverConfig: kappa_x_floor must be > 0");
  }
}

template <typename Scalar>
struct RunStats {
  long long steps{0};
  Scalar min_theta{std::numeric_limits<Scalar>::infinity()};  // over all steps
  Scalar final_time{0};
};

/// Snapshots at the requested output times (strictly increasing), plus the
/// step statistics of the run that produced them.
template <typename Scalar>
struct Trajectory {
  std::vector<DensityPair<Scalar>> snapshots;
  RunStats<Scalar> stats;
};

/// Called after every accepted step with the new time, the step size, and
/// views of the updated cell densities (valid only during the call).
template <typename Scalar>
using StepHook = std::function<void(Scalar t, Scalar dt,
                                    const ArrayX<Scalar>& theta_plus,
                                    const ArrayX<Scalar>& theta_minus)>;

namespace detail {

/// Scratch arrays reused across steps; all sized on first use.
template <typename Scalar>
struct StepWorkspace {
  ArrayX<Scalar> total, diff;              // n cells
  ArrayX<Scalar> grad_diff, face_mean;     // n-1 interior faces
  ArrayX<Scalar> donor_tot_p, donor_tot_m; // donor-side totals
  ArrayX<Scalar> donor_p, donor_m;
  ArrayX<Scalar> flux_p, flux_m;
  Eigen::Array<bool, Eigen::Dynamic, 1> vpos;

  void resize(Index n) {
    total.resize(n);
    diff.resize(n);
    grad_diff.resize(n - 1);
    face_mean.resize(n - 1);
    donor_tot_p.resize(n - 1);
    donor_tot_m.resize(n - 1);
    donor_p.resize(n - 1);
    donor_m.resize(n - 1);
    flux_p.resize(n - 1);
    flux_m.resize(n - 1);
    vpos.resize(n - 1);
  }
};

/// Interior-face fluxes of the conservative form
///   theta+_t = [ v theta+ + eps theta+_x ]_x,
///   theta-_t = [ -v theta- + eps theta-_x ]_x,
///   v = (theta+ - theta-)_x / (theta+ + theta-) - tau.
///
/// The gradient (theta+ - theta-)_x at a face is the centered difference of
/// the adjacent cell values, identical to the stencil of the diffusive flux.
/// Each species is donor-cell upwinded against its own drift (-v for theta+,
/// +v for theta-; the donor side comes from the sign of v evaluated with the
/// arithmetic face mean in the denominator). The transported product v theta
/// is then evaluated with the donor-cell density ratio,
///   flux+ = (theta+-theta-)_x (theta+/total)|donor - tau theta+|donor + ...,
/// so that with theta- == 0 and tau = 0 the update collapses to the exact
/// discrete heat equation with coefficient (1 + eps).
/// Wall faces carry identically zero flux; the cell masses telescope.
template <typename Scalar>
void face_fluxes(const ArrayX<Scalar>& tp, const ArrayX<Scalar>& tm,
                 Scalar dx, const SolverConfig<Scalar>& cfg,
                 StepWorkspace<Scalar>& w, Scalar time_for_message) {
  const Index n = tp.size();
  w.resize(n);
  w.total = tp + tm;
  const Scalar tot_min = w.total.minCoeff();
  if (!(tot_min >= cfg.kappa_x_floor)) {
    throw NumericalError(
        "solver: total density " + std::to_string(double(tot_min)) +
        " below floor " + std::to_string(double(cfg.kappa_x_floor)) +
        " at t = " + std::to_string(double(time_for_message)));
  }
  w.diff = tp - tm;
  const Scalar inv_dx = Scalar(1) / dx;
  w.grad_diff = (w.diff.tail(n - 1) - w.diff.head(n - 1)) * inv_dx;
  w.face_mean = Scalar(0.5) * (w.total.head(n - 1) + w.total.tail(n - 1));
  w.vpos = (w.grad_diff / w.face_mean - cfg.tau) > Scalar(0);

  // v > 0: theta+ donates from the right cell, theta- from the left.
  w.donor_p = w.vpos.select(tp.tail(n - 1), tp.head(n - 1));
  w.donor_tot_p = w.vpos.select(w.total.tail(n - 1), w.total.head(n - 1));
  w.donor_m = w.vpos.select(tm.head(n - 1), tm.tail(n - 1));
  w.donor_tot_m = w.vpos.select(w.total.head(n - 1), w.total.tail(n - 1));

  w.flux_p = w.grad_diff * (w.donor_p / w.donor_tot_p) -
             cfg.tau * w.donor_p +
             cfg.epsilon * (tp.tail(n - 1) - tp.head(n - 1)) * inv_dx;
  w.flux_m = -(w.grad_diff * (w.donor_m / w.donor_tot_m) -
               cfg.tau * w.donor_m) +
             cfg.epsilon * (tm.tail(n - 1) - tm.head(n - 1)) * inv_dx;
}

template <typename Scalar>
Scalar cfl_dt_arrays(const ArrayX<Scalar>& tp, const ArrayX<Scalar>& tm,
                     Scalar dx, const SolverConfig<Scalar>& cfg,
                     StepWorkspace<Scalar>& w, Scalar time_for_message) {
  const Index n = tp.size();
  w.resize(n);
  w.total = tp + tm;
  const Scalar tot_min = w.total.minCoeff();
  if (!(tot_min >= cfg.kappa_x_floor)) {
    throw NumericalError(
        "cfl_dt: total density " + std::to_string(double(tot_min)) +
        " below floor at t = " + std::to_string(double(time_for_message)));
  }
  w.diff = tp - tm;
  const Scalar inv_dx = Scalar(1) / dx;
  w.grad_diff = (w.diff.tail(n - 1) - w.diff.head(n - 1)) * inv_dx;
  w.face_mean = Scalar(0.5) * (w.total.head(n - 1) + w.total.tail(n - 1));
  const Scalar vmax =
      (w.grad_diff / w.face_mean - cfg.tau).abs().maxCoeff();
  const Scalar dt_diff = dx * dx / (Scalar(2) * (Scalar(1) + cfg.epsilon));
  Scalar dt = dt_diff;
  if (vmax > Scalar(0)) dt = std::min(dt, dx / vmax);
  return cfg.cfl * dt;
}

/// One explicit update theta_i += (dt/dx)(F_{i+1} - F_i); fluxes must already
/// be in the workspace. Writes into out_p/out_m (may not alias tp/tm).
template <typename Scalar>
void apply_fluxes(const ArrayX<Scalar>& tp, const ArrayX<Scalar>& tm,
                  Scalar dx, Scalar dt, const StepWorkspace<Scalar>& w,
                  ArrayX<Scalar>& out_p, ArrayX<Scalar>& out_m) {
  const Index n = tp.size();
  const Scalar lam = dt / dx;
  out_p = tp;
  out_m = tm;
  out_p.head(n - 1) += lam * w.flux_p;
  out_p.tail(n - 1) -= lam * w.flux_p;
  out_m.head(n - 1) += lam * w.flux_m;
  out_m.tail(n - 1) -= lam * w.flux_m;
}

template <typename Scalar>
void check_updated(const ArrayX<Scalar>& tp, const ArrayX<Scalar>& tm,
                   Scalar time) {
  if (!(tp.allFinite() && tm.allFinite())) {
    throw NumericalError("solver: non-finite density at t = " +
                         std::to_string(double(time)));
  }
  const Scalar mn = std::min(tp.minCoeff(), tm.minCoeff());
  if (mn < Scalar(-kPositivityTol)) {
    throw NumericalError("solver: negative density " +
                         std::to_string(double(mn)) + " at t = " +
                         std::to_string(double(time)) +
                         " (CFL violated or density floor reached)");
  }
}

}  // namespace detail

/// Largest stable explicit step:
///   dt = cfl * min( dx^2 / (2 (1 + eps)),  dx / max_faces |v| ),
/// with v the face transport velocity defined above. Signals when the total
/// density sits below the floor.
template <typename Scalar>
Scalar cfl_dt(const DensityPair<Scalar>& densities,
              const SolverConfig<Scalar>& config) {
  check_config(config);
  detail::StepWorkspace<Scalar> w;
  return detail::cfl_dt_arrays(densities.theta_plus, densities.theta_minus,
                               densities.grid.dx, config, w, densities.time);
}

/// One conservative upwind step of size dt (caller guarantees
/// dt <= cfl_dt(densities, config)). Masses of theta+ and theta- are
/// conserved to rounding; under the CFL bound the densities stay
/// non-negative. Signals NaN/Inf and negative densities beyond -1e-12.
template <typename Scalar>
DensityPair<Scalar> step(const DensityPair<Scalar>& densities,
                         const SolverConfig<Scalar>& config, Scalar dt) {
  check_config(config);
  if (!(dt > Scalar(0))) throw std::invalid_argument("step: dt must be > 0");
  detail::StepWorkspace<Scalar> w;
  DensityPair<Scalar> out;
  out.grid = densities.grid;
  out.time = densities.time + dt;
  detail::face_fluxes(densities.theta_plus, densities.theta_minus,
                      densities.grid.dx, config, w, densities.time);
  detail::apply_fluxes(densities.theta_plus, densities.theta_minus,
                       densities.grid.dx, dt, w, out.theta_plus,
                       out.theta_minus);
  detail::check_updated(out.theta_plus, out.theta_minus, out.time);
  return out;
}

/// Advances with CFL-limited steps, truncating steps to land exactly on every
/// requested output time (strictly increasing, all <= config.t_end).
/// A snapshot at time 0 records the initial state. Step errors are rethrown
/// with the failure time attached.
template <typename Scalar>
Trajectory<Scalar> run_until(const DensityPair<Scalar>& densities,
                             const SolverConfig<Scalar>& config,
                             const std::vector<Scalar>& output_times,
                             const StepHook<Scalar>& hook = {}) {
  check_config(config);
  for (std::size_t i = 0; i < output_times.size(); ++i) {
    if (output_times[i] < Scalar(0) || output_times[i] > config.t_end) {
      throw std::invalid_argument("run_until: output times must lie in [0, t_end]");
    }
    if (i > 0 && !(output_times[i] > output_times[i - 1])) {
      throw std::invalid_argument("run_until: output times must be strictly increasing");
    }
  }

  Trajectory<Scalar> traj;
  traj.snapshots.reserve(output_times.size());
  DensityPair<Scalar> cur = densities;
  cur.time = Scalar(0);
  detail::StepWorkspace<Scalar> w;
  ArrayX<Scalar> next_p(cur.grid.n_cells), next_m(cur.grid.n_cells);
  traj.stats.min_theta =
      std::min(cur.theta_plus.minCoeff(), cur.theta_minus.minCoeff());

  std::size_t out_idx = 0;
  if (out_idx < output_times.size() && output_times[out_idx] == Scalar(0)) {
    traj.snapshots.push_back(cur);
    ++out_idx;
  }
  while (out_idx < output_times.size()) {
    const Scalar target = output_times[out_idx];
    while (cur.time < target) {
      Scalar dt = detail::cfl_dt_arrays(cur.theta_plus, cur.theta_minus,
                                        cur.grid.dx, config, w, cur.time);
      if (cur.time + dt > target) dt = target - cur.time;
      detail::face_fluxes(cur.theta_plus, cur.theta_minus, cur.grid.dx,
                          config, w, cur.time);
      detail::apply_fluxes(cur.theta_plus, cur.theta_minus, cur.grid.dx, dt,
                           w, next_p, next_m);
      detail::check_updated(next_p, next_m, cur.time + dt);
      cur.theta_plus.swap(next_p);
      cur.theta_minus.swap(next_m);
      cur.time = (cur.time + dt >= target) ? target : cur.time + dt;
      ++traj.stats.steps;
      traj.stats.min_theta =
          std::min({traj.stats.min_theta, cur.theta_plus.minCoeff(),
                    cur.theta_minus.minCoeff()});
      if (hook) hook(cur.time, dt, cur.theta_plus, cur.theta_minus);
    }
    traj.snapshots.push_back(cur);
    ++out_idx;
  }
  traj.stats.final_time = cur.time;
  return traj;
}

template <typename Scalar>
struct SteadyResult {
  DensityPair<Scalar> state;
  Scalar time{0};
  long long steps{0};
  Scalar residual{0};  // max |theta_new - theta| / dt at the last step
};

/// Thrown when the steady residual fails to drop below steady_tol before
/// config.max_steady_time; carries the last state reached.
template <typename Scalar>
class SteadyNotConverged : public NumericalError {
 public:
  SteadyNotConverged(SteadyResult<Scalar> partial, const std::string& msg)
      : NumericalError(msg), partial_(std::move(partial)) {}
  const SteadyResult<Scalar>& partial() const { return partial_; }

 private:
  SteadyResult<Scalar> partial_;
};

/// Steps until max|theta(next) - theta(now)| / dt < config.steady_tol.
template <typename Scalar>
SteadyResult<Scalar> run_to_steady(const DensityPair<Scalar>& densities,
                                   const SolverConfig<Scalar>& config) {
  check_config(config);
  DensityPair<Scalar> cur = densities;
  cur.time = Scalar(0);
  detail::StepWorkspace<Scalar> w;
  ArrayX<Scalar> next_p(cur.grid.n_cells), next_m(cur.grid.n_cells);
  SteadyResult<Scalar> res;
  res.residual = std::numeric_limits<Scalar>::infinity();
  while (cur.time < config.max_steady_time) {
    const Scalar dt = detail::cfl_dt_arrays(cur.theta_plus, cur.theta_minus,
                                            cur.grid.dx, config, w, cur.time);
    detail::face_fluxes(cur.theta_plus, cur.theta_minus, cur.grid.dx, config,
                        w, cur.time);
    detail::apply_fluxes(cur.theta_plus, cur.theta_minus, cur.grid.dx, dt, w,
                         next_p, next_m);
    detail::check_updated(next_p, next_m, cur.time + dt);
    const Scalar residual =
        std::max((next_p - cur.theta_plus).abs().maxCoeff(),
                 (next_m - cur.theta_minus).abs().maxCoeff()) /
        dt;
    cur.theta_plus.swap(next_p);
    cur.theta_minus.swap(next_m);
    cur.time += dt;
    ++res.steps;
    res.residual = residual;
    if (residual < config.steady_tol) {
      res.state = cur;
      res.time = cur.time;
      return res;
    }
  }
  res.state = cur;
  res.time = cur.time;
  throw SteadyNotConverged<Scalar>(
      res, "run_to_steady: residual " + std::to_string(double(res.residual)) +
               " still above tol " + std::to_string(double(config.steady_tol)) +
               " at t = " + std::to_string(double(cur.time)));
}

/// One-sided reconstruction of the total fluxes of theta+ and theta- at the
/// two walls: the scheme imposes zero at the wall faces themselves, so this
/// linearly extrapolates the two nearest interior face fluxes to each wall.
/// A transient state shows finite values; at a discrete steady state all four
/// vanish with the residual.
template <typename Scalar>
struct WallFluxes {
  struct Side {
    Scalar plus{0};
    Scalar minus{0};
  };
  Side left, right;
};

template <typename Scalar>
WallFluxes<Scalar> wall_flux(const DensityPair<Scalar>& densities,
                             const SolverConfig<Scalar>& config) {
  check_config(config);
  detail::StepWorkspace<Scalar> w;
  detail::face_fluxes(densities.theta_plus, densities.theta_minus,
                      densities.grid.dx, config, w, densities.time);
  const Index f = w.flux_p.size();
  WallFluxes<Scalar> out;
  out.left.plus = Scalar(2) * w.flux_p(0) - w.flux_p(1);
  out.left.minus = Scalar(2) * w.flux_m(0) - w.flux_m(1);
  out.right.plus = Scalar(2) * w.flux_p(f - 1) - w.flux_p(f - 2);
  out.right.minus = Scalar(2) * w.flux_m(f - 1) - w.flux_m(f - 2);
  return out;
}

}  // namespace chandyn
