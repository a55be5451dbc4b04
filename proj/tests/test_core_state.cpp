#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "chandyn/core_state.hpp"
#include "chandyn/initial_data.hpp"
#include "support/oracles.hpp"

using namespace chandyn;

TEST_CASE("build_grid covers [-1,1] uniformly") {
  const auto g = build_grid(4);
  CHECK(g.dx == doctest::Approx(0.5).epsilon(1e-14));
  REQUIRE(g.nodes.size() == 5);
  const double expected[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (Index i = 0; i < 5; ++i) {
    CHECK(g.nodes(i) == doctest::Approx(expected[i]).epsilon(1e-14));
  }

  const auto g200 = build_grid(200);
  CHECK(g200.dx == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(g200.nodes(0) == -1.0);
  CHECK(g200.nodes(200) == 1.0);
  // uniformity within 1e-12
  for (Index i = 0; i < 200; ++i) {
    CHECK(std::abs(g200.nodes(i + 1) - g200.nodes(i) - g200.dx) < 1e-12);
  }

  CHECK_THROWS_AS(build_grid(2), std::invalid_argument);
}

TEST_CASE("derive_densities on linear profiles") {
  const auto g = build_grid(8);
  ChannelState<double> s{g, ArrayXd::Zero(9), g.nodes, 0.0};

  SUBCASE("rho = 0, kappa = x gives theta+- = 1/2") {
    const auto d = derive_densities(s);
    CHECK((d.theta_plus - 0.5).abs().maxCoeff() < 1e-14);
    CHECK((d.theta_minus - 0.5).abs().maxCoeff() < 1e-14);
  }

  SUBCASE("rho = x, kappa = x gives theta+ = 1, theta- = 0") {
    s.rho = g.nodes;
    const auto d = derive_densities(s);
    CHECK((d.theta_plus - 1.0).abs().maxCoeff() < 1e-14);
    CHECK(d.theta_minus.abs().maxCoeff() < 1e-14);
  }

  SUBCASE("negative density signals") {
    s.rho = 2.0 * g.nodes;  // |rho_x| > kappa_x
    CHECK_THROWS_AS(derive_densities(s), NumericalError);
  }
}

TEST_CASE("default profiles at the extreme amplitude stay admissible") {
  const auto g = build_grid(256);
  const auto p = default_profiles(5.0 / 16.0);
  const auto s = make_initial_state(p, g);
  const auto d = derive_densities(s);
  CHECK(std::min(d.theta_plus.minCoeff(), d.theta_minus.minCoeff()) >= 0.0);
}

TEST_CASE("reconstruct_profiles") {
  const auto g = build_grid(10);

  SUBCASE("constant halves give rho = 0, kappa = x") {
    DensityPair<double> d{g, ArrayXd::Constant(10, 0.5),
                          ArrayXd::Constant(10, 0.5), 0.0};
    const auto s = reconstruct_profiles(d);
    CHECK(s.rho.abs().maxCoeff() < 1e-14);
    CHECK((s.kappa - g.nodes).abs().maxCoeff() < 1e-14);
  }

  SUBCASE("non-admissible densities flag mass drift") {
    // theta+ = 1, theta- = 0: anchored integration would give rho(1) = 2.
    DensityPair<double> d{g, ArrayXd::Constant(10, 1.0), ArrayXd::Zero(10),
                          0.0};
    CHECK_THROWS_AS(reconstruct_profiles(d), NumericalError);
  }

  SUBCASE("round trip on default initial data is exact on slopes") {
    const auto fine = build_grid(200);
    const auto s0 = make_initial_state(default_profiles(0.2), fine);
    const auto d = derive_densities(s0);
    const auto s1 = reconstruct_profiles(d);
    const auto d1 = derive_densities(s1);
    CHECK((d1.theta_plus - d.theta_plus).abs().maxCoeff() < 1e-13);
    CHECK((d1.theta_minus - d.theta_minus).abs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("round-trip and boundary recovery on random admissible densities") {
  std::mt19937_64 rng(20260809u);
  const auto g = build_grid(64);
  for (int rep = 0; rep < 50; ++rep) {
    DensityPair<double> d;
    d.grid = g;
    oracles::random_unit_densities(rng, g.n_cells, g.dx, d.theta_plus,
                                   d.theta_minus);
    const auto s = reconstruct_profiles(d);
    CHECK(std::abs(s.kappa(g.n_cells) - 1.0) < 1e-10);
    CHECK(std::abs(s.rho(g.n_cells)) < 1e-10);
    const auto d2 = derive_densities(s);
    CHECK((d2.theta_plus - d.theta_plus).abs().maxCoeff() < 1e-13);
    CHECK((d2.theta_minus - d.theta_minus).abs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("check_state enforces anchors and the slope condition") {
  const auto g = build_grid(16);
  ChannelState<double> good{g, ArrayXd::Zero(17), g.nodes, 0.0};
  CHECK_NOTHROW(check_state(good));

  auto bad_rho = good;
  bad_rho.rho(16) = 0.5;
  CHECK_THROWS_AS(check_state(bad_rho), std::invalid_argument);

  auto bad_kappa = good;
  bad_kappa.kappa(0) = -0.8;
  CHECK_THROWS_AS(check_state(bad_kappa), std::invalid_argument);

  // anchors intact but |rho_x| exceeds kappa_x in the interior
  auto bad_slope = good;
  bad_slope.rho = (M_PI * g.nodes).sin();
  CHECK_THROWS_AS(check_state(bad_slope), std::invalid_argument);

  auto bad_size = good;
  bad_size.rho = ArrayXd::Zero(12);
  CHECK_THROWS_AS(check_state(bad_size), std::invalid_argument);
}

TEST_CASE("masses and positivity margin") {
  const auto g = build_grid(16);
  DensityPair<double> d{g, ArrayXd::Constant(16, 0.5),
                        ArrayXd::Constant(16, 0.5), 0.0};
  const auto [mp, mm] = masses(d);
  CHECK(mp == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mm == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(positivity_margin(d) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("nodal gradient is second order at the ends") {
  const auto g = build_grid(50);
  const ArrayXd u = g.nodes * g.nodes * g.nodes;
  const ArrayXd gr = nodal_gradient(u, g.dx);
  const ArrayXd exact = 3.0 * g.nodes * g.nodes;
  // truncation on u = x^3: dx^2 centered, ~3 dx^2 one-sided
  CHECK(std::abs(gr(0) - exact(0)) < 4.0 * g.dx * g.dx);
  CHECK(std::abs(gr(25) - exact(25)) < 1.1 * g.dx * g.dx);
}

TEST_CASE("core types instantiate for float") {
  const auto g = build_grid<float>(8);
  ChannelState<float> s{g, ArrayX<float>::Zero(9), g.nodes, 0.0f};
  const auto d = derive_densities(s, 1e-5f);
  CHECK((d.theta_plus - 0.5f).abs().maxCoeff() < 1e-6f);
  const auto back = reconstruct_profiles(d, 1e-4f);
  CHECK((back.kappa - g.nodes).abs().maxCoeff() < 1e-6f);
}
