#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "chandyn/core_state.hpp"

namespace chandyn {

/// A scalar profile on [-1, 1] together with its first two derivatives.
/// exact_derivatives is false when the derivatives were obtained from
/// finite-difference stencils on sampled data (reduced confidence in the
/// boundary compatibility checks, which involve second derivatives at +-1).
template <typename Scalar>
struct Profile {
  std::function<Scalar(Scalar)> value;
  std::function<Scalar(Scalar)> deriv1;
  std::function<Scalar(Scalar)> deriv2;
  bool exact_derivatives{true};
};

template <typename Scalar>
struct InitialProfiles {
  Profile<Scalar> rho0;
  Profile<Scalar> kappa0;
  std::map<std::string, Scalar> params;
};

/// Boundary-layer corrector: [1 - cos(tau (x^2 - 1))] / (4 tau^2), zero when
/// tau = 0. Vanishes with its first derivative at x = +-1 and has second
/// derivative exactly 1 there.
template <typename Scalar>
Scalar phi(Scalar x, Scalar tau) {
  if (tau == Scalar(0)) return Scalar(0);
  using std::cos;
  return (Scalar(1) - cos(tau * (x * x - Scalar(1)))) /
         (Scalar(4) * tau * tau);
}

template <typename Scalar>
Scalar phi_deriv1(Scalar x, Scalar tau) {
  if (tau == Scalar(0)) return Scalar(0);
  using std::sin;
  return x * sin(tau * (x * x - Scalar(1))) / (Scalar(2) * tau);
}

template <typename Scalar>
Scalar phi_deriv2(Scalar x, Scalar tau) {
  if (tau == Scalar(0)) return Scalar(0);
  using std::cos;
  using std::sin;
  const Scalar a = tau * (x * x - Scalar(1));
  return sin(a) / (Scalar(2) * tau) + x * x * cos(a);
}

struct PhiPropertyReport {
  bool p1_ok{false};   // phi, phi' vanish at +-1
  bool p2_ok{false};   // phi'' = 1 at +-1
  bool p3_ok{false};   // |phi'| < 1/|tau| on all samples
  bool vacuous{false}; // tau = 0: phi == 0, (P2)/(P3) carry no content
  double p1_residual{0};
  double p2_residual{0};
  double p3_margin{0};  // min over samples of 1/|tau| - |phi'|
  double p3_worst_x{0};
};

template <typename Scalar>
PhiPropertyReport phi_property_report(Scalar tau, Index n_samples) {
  if (n_samples < 10) {
    throw std::invalid_argument("phi_property_report: n_samples must be >= 10");
  }
  PhiPropertyReport rep;
  using std::abs;
  rep.p1_residual = std::max(
      {abs(double(phi(Scalar(-1), tau))), abs(double(phi(Scalar(1), tau))),
       abs(double(phi_deriv1(Scalar(-1), tau))),
       abs(double(phi_deriv1(Scalar(1), tau)))});
  rep.p1_ok = rep.p1_residual <= 1e-12;
  if (tau == Scalar(0)) {
    rep.vacuous = true;
    rep.p2_ok = true;
    rep.p3_ok = true;
    return rep;
  }
  rep.p2_residual =
      std::max(abs(double(phi_deriv2(Scalar(-1), tau)) - 1.0),
               abs(double(phi_deriv2(Scalar(1), tau)) - 1.0));
  rep.p2_ok = rep.p2_residual <= 1e-12;
  const double cap = 1.0 / std::abs(double(tau));
  rep.p3_margin = cap;
  for (Index i = 0; i <= n_samples; ++i) {
    const Scalar x =
        Scalar(-1) + Scalar(2) * Scalar(i) / Scalar(n_samples);
    const double m = cap - std::abs(double(phi_deriv1(x, tau)));
    if (m < rep.p3_margin) {
      rep.p3_margin = m;
      rep.p3_worst_x = double(x);
    }
  }
  rep.p3_ok = rep.p3_margin > 0;
  return rep;
}

/// Built-in admissible family: kappa0 = (15x - 10x^3 + 3x^5)/8 and
/// rho0 = c (1 - x^2)^3. kappa0_x = 15(1-x^2)^2/8 dominates |rho0_x| exactly
/// when |c| <= 5/16, with equality only at |x| = 1 at the extreme c.
template <typename Scalar>
InitialProfiles<Scalar> default_profiles(Scalar c) {
  using std::abs;
  if (abs(c) > Scalar(5) / Scalar(16)) {
    throw std::invalid_argument(
        "default_profiles: |c| must be <= 5/16 (positivity of the densities)");
  }
  InitialProfiles<Scalar> p;
  p.params["c"] = c;
  p.kappa0.value = [](Scalar x) {
    return (Scalar(15) * x - Scalar(10) * x * x * x +
            Scalar(3) * x * x * x * x * x) /
           Scalar(8);
  };
  p.kappa0.deriv1 = [](Scalar x) {
    const Scalar q = Scalar(1) - x * x;
    return Scalar(15) * q * q / Scalar(8);
  };
  p.kappa0.deriv2 = [](Scalar x) {
    const Scalar q = Scalar(1) - x * x;
    return Scalar(-15) * x * q / Scalar(2);
  };
  p.rho0.value = [c](Scalar x) {
    const Scalar q = Scalar(1) - x * x;
    return c * q * q * q;
  };
  p.rho0.deriv1 = [c](Scalar x) {
    const Scalar q = Scalar(1) - x * x;
    return Scalar(-6) * c * x * q * q;
  };
  p.rho0.deriv2 = [c](Scalar x) {
    const Scalar q = Scalar(1) - x * x;
    return Scalar(-6) * c * q * (q - Scalar(4) * x * x);
  };
  return p;
}

namespace detail {

template <typename Scalar>
void check_initial_profiles(const InitialProfiles<Scalar>& p,
                            Index samples = 2001) {
  using std::abs;
  // sampled profiles carry stencil-derived derivatives; the wall checks get
  // correspondingly more slack
  const bool exact =
      p.rho0.exact_derivatives && p.kappa0.exact_derivatives;
  const double tol = exact ? 1e-8 : 1e-4;
  if (abs(double(p.kappa0.value(Scalar(1))) - 1.0) > tol ||
      abs(double(p.kappa0.value(Scalar(-1))) + 1.0) > tol) {
    throw std::invalid_argument("initial profiles: kappa0(+-1) != +-1");
  }
  if (abs(double(p.rho0.value(Scalar(1)))) > tol ||
      abs(double(p.rho0.value(Scalar(-1)))) > tol) {
    throw std::invalid_argument("initial profiles: rho0(+-1) != 0");
  }
  for (const Scalar e : {Scalar(-1), Scalar(1)}) {
    if (abs(double(p.rho0.deriv1(e))) > tol ||
        abs(double(p.rho0.deriv2(e))) > tol ||
        abs(double(p.kappa0.deriv1(e))) > tol ||
        abs(double(p.kappa0.deriv2(e))) > tol) {
      throw std::invalid_argument(
          "initial profiles: first/second derivatives must vanish at +-1");
    }
  }
  for (Index i = 0; i <= samples; ++i) {
    const Scalar x = Scalar(-1) + Scalar(2) * Scalar(i) / Scalar(samples);
    if (double(p.kappa0.deriv1(x)) - std::abs(double(p.rho0.deriv1(x))) <
        -1e-12) {
      throw std::invalid_argument(
          "initial profiles: kappa0_x >= |rho0_x| violated near x = " +
          std::to_string(double(x)));
    }
  }
}

}  // namespace detail

/// Blends the profiles with the corrector phi and the linear ramp:
///   rho^eps = (rho0 + eps tau phi) / (1 + eps)^2,
///   kappa^eps = (kappa0 + eps x) / (1 + eps).
/// The output keeps the boundary anchors, gains the corner compatibility
/// (1+eps) D2 of each field = tau D1 of the partner at x = +-1, and a strict
/// slope gap of at least eps (1 - |tau| |phi'|) / (1 + eps).
template <typename Scalar>
InitialProfiles<Scalar> regularize_initial(const InitialProfiles<Scalar>& p,
                                           Scalar epsilon, Scalar tau) {
  if (!(epsilon > Scalar(0) && epsilon < Scalar(1))) {
    throw std::invalid_argument("regularize_initial: epsilon must be in (0,1)");
  }
  detail::check_initial_profiles(p);
  const Scalar d2 = (Scalar(1) + epsilon) * (Scalar(1) + epsilon);
  const Scalar d1 = Scalar(1) + epsilon;
  InitialProfiles<Scalar> out;
  out.params = p.params;
  out.params["epsilon"] = epsilon;
  out.params["tau"] = tau;
  const Profile<Scalar> r = p.rho0;
  const Profile<Scalar> k = p.kappa0;
  out.rho0.value = [r, epsilon, tau, d2](Scalar x) {
    return (r.value(x) + epsilon * tau * phi(x, tau)) / d2;
  };
  out.rho0.deriv1 = [r, epsilon, tau, d2](Scalar x) {
    return (r.deriv1(x) + epsilon * tau * phi_deriv1(x, tau)) / d2;
  };
  out.rho0.deriv2 = [r, epsilon, tau, d2](Scalar x) {
    return (r.deriv2(x) + epsilon * tau * phi_deriv2(x, tau)) / d2;
  };
  out.rho0.exact_derivatives = r.exact_derivatives;
  out.kappa0.value = [k, epsilon, d1](Scalar x) {
    return (k.value(x) + epsilon * x) / d1;
  };
  out.kappa0.deriv1 = [k, epsilon, d1](Scalar x) {
    return (k.deriv1(x) + epsilon) / d1;
  };
  out.kappa0.deriv2 = [k, d1](Scalar x) { return k.deriv2(x) / d1; };
  out.kappa0.exact_derivatives = k.exact_derivatives;
  return out;
}

/// Pass/fail record for the admissibility conditions of a profile pair.
/// Residuals are reported so degenerate passes (both sides zero) are visible.
struct CompatibilityReport {
  bool boundary_ok{false};        // rho(+-1) = 0 and kappa(+-1) = +-1
  bool corner_ok{false};          // (1+eps) D2 = tau D1 of partner at +-1
  bool gap_ok{false};             // min(kappa_x - |rho_x|) > 0 strictly
  bool quantitative_gap_ok{false};// gap >= eps (1 - |tau||phi'|) / (1+eps)
  bool reduced_confidence{false}; // derivatives came from stencils
  double boundary_residual{0};
  double corner_residual{0};
  double corner_lhs[4]{0, 0, 0, 0};  // (1+e)rho''(-1), (1+e)rho''(1),
  double corner_rhs[4]{0, 0, 0, 0};  // (1+e)kap''(-1), (1+e)kap''(1) vs partners
  double min_gap{0};
  double min_quantitative_slack{0};
  bool all_ok() const {
    return boundary_ok && corner_ok && gap_ok && quantitative_gap_ok;
  }
};

/// Evaluates the boundary values, the two corner compatibility equalities
/// (within 1e-8), the strict positivity gap, and the quantitative gap bound
/// tied to the corrector phi. For un-regularized input the quantitative bound
/// is evaluated with the same (epsilon, tau) and will typically fail.
template <typename Scalar>
CompatibilityReport compatibility_report(const InitialProfiles<Scalar>& p,
                                         Scalar epsilon, Scalar tau,
                                         Index samples = 2001) {
  using std::abs;
  CompatibilityReport rep;
  rep.reduced_confidence =
      !(p.rho0.exact_derivatives && p.kappa0.exact_derivatives);
  const double tol = 1e-8;

  rep.boundary_residual = std::max(
      {abs(double(p.rho0.value(Scalar(-1)))), abs(double(p.rho0.value(Scalar(1)))),
       abs(double(p.kappa0.value(Scalar(-1))) + 1.0),
       abs(double(p.kappa0.value(Scalar(1))) - 1.0)});
  rep.boundary_ok = rep.boundary_residual <= tol;

  const double onePe = 1.0 + double(epsilon);
  int idx = 0;
  for (const Scalar e : {Scalar(-1), Scalar(1)}) {
    rep.corner_lhs[idx] = onePe * double(p.rho0.deriv2(e));
    rep.corner_rhs[idx] = double(tau) * double(p.kappa0.deriv1(e));
    rep.corner_lhs[idx + 2] = onePe * double(p.kappa0.deriv2(e));
    rep.corner_rhs[idx + 2] = double(tau) * double(p.rho0.deriv1(e));
    ++idx;
  }
  rep.corner_residual = 0;
  for (int i = 0; i < 4; ++i) {
    rep.corner_residual = std::max(
        rep.corner_residual, std::abs(rep.corner_lhs[i] - rep.corner_rhs[i]));
  }
  rep.corner_ok = rep.corner_residual <= tol;

  rep.min_gap = std::numeric_limits<double>::infinity();
  rep.min_quantitative_slack = std::numeric_limits<double>::infinity();
  for (Index i = 0; i <= samples; ++i) {
    const Scalar x = Scalar(-1) + Scalar(2) * Scalar(i) / Scalar(samples);
    const double gap =
        double(p.kappa0.deriv1(x)) - std::abs(double(p.rho0.deriv1(x)));
    rep.min_gap = std::min(rep.min_gap, gap);
    const double lower = double(epsilon) *
                         (1.0 - std::abs(double(tau)) *
                                    std::abs(double(phi_deriv1(x, tau)))) /
                         onePe;
    rep.min_quantitative_slack =
        std::min(rep.min_quantitative_slack, gap - lower);
  }
  rep.gap_ok = rep.min_gap > 0;
  rep.quantitative_gap_ok = rep.min_quantitative_slack >= -tol;
  return rep;
}

/// Builds a Profile from samples; derivatives use 4th-order stencils on the
/// sample grid (one-sided at the ends) and are linearly interpolated, so the
/// result carries exact_derivatives = false unless derivative samples are
/// supplied. Sample abscissae must be strictly increasing and uniform.
template <typename Scalar>
Profile<Scalar> make_sampled_profile(
    const ArrayX<Scalar>& x, const ArrayX<Scalar>& v,
    const std::optional<ArrayX<Scalar>>& d1 = std::nullopt,
    const std::optional<ArrayX<Scalar>>& d2 = std::nullopt) {
  const Index m = x.size();
  if (m < 7 || v.size() != m) {
    throw std::invalid_argument(
        "make_sampled_profile: need >= 7 matching samples");
  }
  const Scalar h = x(1) - x(0);
  for (Index i = 1; i < m; ++i) {
    if (std::abs(double((x(i) - x(i - 1)) - h)) > 1e-9 * std::abs(double(h))) {
      throw std::invalid_argument(
          "make_sampled_profile: samples must be uniformly spaced");
    }
  }
  auto interp = [](ArrayX<Scalar> xs, ArrayX<Scalar> vs) {
    return [xs = std::move(xs), vs = std::move(vs)](Scalar q) -> Scalar {
      const Index m = xs.size();
      if (q <= xs(0)) return vs(0);
      if (q >= xs(m - 1)) return vs(m - 1);
      const Scalar h = xs(1) - xs(0);
      Index i = static_cast<Index>(double((q - xs(0)) / h));
      i = std::clamp<Index>(i, 0, m - 2);
      const Scalar w = (q - xs(i)) / (xs(i + 1) - xs(i));
      return (Scalar(1) - w) * vs(i) + w * vs(i + 1);
    };
  };

  // 4th-order first derivative and 2nd-order-or-better second derivative on
  // the sample grid.
  auto stencil_d1 = [&](const ArrayX<Scalar>& f) {
    ArrayX<Scalar> g(m);
    const Scalar ih = Scalar(1) / h;
    for (Index i = 0; i < m; ++i) {
      if (i >= 2 && i <= m - 3) {
        g(i) = (f(i - 2) - Scalar(8) * f(i - 1) + Scalar(8) * f(i + 1) -
                f(i + 2)) /
               Scalar(12) * ih;
      } else if (i < 2) {
        g(i) = (Scalar(-25) * f(i) + Scalar(48) * f(i + 1) -
                Scalar(36) * f(i + 2) + Scalar(16) * f(i + 3) -
                Scalar(3) * f(i + 4)) /
               Scalar(12) * ih;
      } else {
        g(i) = (Scalar(25) * f(i) - Scalar(48) * f(i - 1) +
                Scalar(36) * f(i - 2) - Scalar(16) * f(i - 3) +
                Scalar(3) * f(i - 4)) /
               Scalar(12) * ih;
      }
    }
    return g;
  };

  Profile<Scalar> prof;
  prof.value = interp(x, v);
  ArrayX<Scalar> g1 = d1 ? *d1 : stencil_d1(v);
  ArrayX<Scalar> g2 = d2 ? *d2 : stencil_d1(g1);
  prof.deriv1 = interp(x, g1);
  prof.deriv2 = interp(x, g2);
  prof.exact_derivatives = d1.has_value() && d2.has_value();
  return prof;
}

/// Samples the profiles on a grid at t = 0.
template <typename Scalar>
ChannelState<Scalar> make_initial_state(const InitialProfiles<Scalar>& p,
                                        const Grid<Scalar>& grid) {
  ChannelState<Scalar> s;
  s.grid = grid;
  s.time = Scalar(0);
  s.rho = grid.nodes.unaryExpr(p.rho0.value);
  s.kappa = grid.nodes.unaryExpr(p.kappa0.value);
  return s;
}

}  // namespace chandyn
