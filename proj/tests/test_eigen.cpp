#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "feller/diffusion.hpp"
#include "feller/eigen.hpp"
#include "feller/grid.hpp"

using namespace feller;

namespace {

DiffusionSpec bm01() {
  return DiffusionSpec::make(0.0, 1.0, 0.5, ScalarFn::from_function([](double x) { return x; }),
                             ScalarFn::from_function([](double x) { return 2.0 * x; }));
}

DiffusionSpec entrance_low() {
  return DiffusionSpec::make(0.0, 1.0, 0.5,
                             ScalarFn::from_function([](double x) { return std::log(x); }),
                             ScalarFn::from_function([](double x) { return x; }));
}

DiffusionSpec logistic_natural() {
  auto lg = [](double x) { return std::log(x / (1.0 - x)); };
  return DiffusionSpec::make(0.0, 1.0, 0.5, ScalarFn::from_function(lg),
                             ScalarFn::from_function(lg));
}

}  // namespace

TEST_CASE("fundamental pair matches hyperbolic closed forms") {
  // s = x, m = 2x, r = 1/2: phi = cosh(x - c), psi = sinh(x - c)
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  for (std::size_t i = G.core_lo; i <= G.core_hi; i += 7) {
    double d = G.x[i] - 0.5;
    CHECK(E.phi[i] == Catch::Approx(std::cosh(d)).epsilon(1e-6));
    CHECK(E.psi[i] == Catch::Approx(std::sinh(d)).margin(1e-7));
    CHECK(E.dphi[i] == Catch::Approx(std::sinh(d)).margin(1e-7));
    CHECK(E.dpsi[i] == Catch::Approx(std::cosh(d)).epsilon(1e-6));
  }
  CHECK(E.gamma_b == Catch::Approx(1.0 / std::tanh(0.5)).epsilon(1e-6));
  CHECK(E.gamma_a == Catch::Approx(-1.0 / std::tanh(0.5)).epsilon(1e-6));
}

TEST_CASE("minimal solutions and endpoint tables, regular-regular") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  const double sh = std::sinh(0.5), ch = std::cosh(0.5);
  for (std::size_t i = G.core_lo; i <= G.core_hi; i += 7) {
    double x = G.x[i];
    CHECK(E.v[i] == Catch::Approx(std::sinh(1.0 - x) / sh).epsilon(2e-6).margin(2e-7));
    CHECK(E.u[i] == Catch::Approx(std::sinh(x) / (2.0 * ch)).epsilon(1e-6).margin(1e-7));
  }
  CHECK(E.v[G.ic] == 1.0);

  REQUIRE(E.v_a.finite);
  CHECK(E.v_a.value == Catch::Approx(std::sinh(1.0) / sh).epsilon(1e-6));
  REQUIRE(E.v_b.finite);
  CHECK(E.v_b.value == Catch::Approx(0.0).margin(1e-6));
  REQUIRE(E.u_a.finite);
  CHECK(E.u_a.value == Catch::Approx(0.0).margin(1e-6));
  REQUIRE(E.u_b.finite);
  CHECK(E.u_b.value == Catch::Approx(sh).epsilon(1e-6));

  REQUIRE(E.du_a.finite);
  CHECK(E.du_a.value == Catch::Approx(1.0 / (2.0 * ch)).epsilon(1e-6));
  REQUIRE(E.dv_a.finite);
  CHECK(E.dv_a.value == Catch::Approx(-std::cosh(1.0) / sh).epsilon(1e-6));
  REQUIRE(E.dv_b.finite);
  CHECK(E.dv_b.value == Catch::Approx(-1.0 / sh).epsilon(1e-6));

  // increasing/decreasing endpoint reciprocity
  CHECK(E.du_a.value == Catch::Approx(1.0 / E.v_a.value).epsilon(1e-6));
  CHECK(E.dv_b.value == Catch::Approx(-1.0 / E.u_b.value).epsilon(1e-6));
}

TEST_CASE("normalized pair has unit Wronskian") {
  auto G = build_grid(bm01());
  for (double r : {0.05, 0.5, 2.0, 8.0}) {
    auto E = compute_eigen(G, r);
    for (std::size_t i = 0; i < G.size(); i += 3) {
      double w = E.v[i] * E.du[i] - E.u[i] * E.dv[i];
      REQUIRE(w == Catch::Approx(1.0).margin(1e-5));
    }
  }
}

TEST_CASE("rate dependence matches closed forms") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 2.0);  // kappa = 2
  CHECK(E.gamma_b == Catch::Approx(2.0 / std::tanh(1.0)).epsilon(1e-6));
  CHECK(E.v_a.value == Catch::Approx(std::sinh(2.0) / std::sinh(1.0)).epsilon(1e-6));
}

TEST_CASE("endpoint tables at an entrance boundary") {
  auto G = build_grid(entrance_low());
  auto E = compute_eigen(G, 1.0);
  CHECK_FALSE(E.v_a.finite);
  CHECK(E.v_a.value > 0.0);
  REQUIRE(E.u_a.finite);
  CHECK(E.u_a.value > 0.0);
  REQUIRE(E.du_a.finite);
  CHECK(E.du_a.value == Catch::Approx(0.0).margin(1e-6));
  REQUIRE(E.dv_a.finite);
  CHECK(E.dv_a.value < 0.0);
  // upper endpoint is regular here
  REQUIRE(E.v_b.finite);
  CHECK(E.v_b.value == Catch::Approx(0.0).margin(1e-6));
  REQUIRE(E.u_b.finite);
  CHECK(E.u_b.value > 0.0);
}

TEST_CASE("endpoint tables at natural boundaries") {
  auto G = build_grid(logistic_natural());
  auto E = compute_eigen(G, 0.5);
  CHECK_FALSE(E.v_a.finite);
  REQUIRE(E.u_a.finite);
  CHECK(E.u_a.value == Catch::Approx(0.0).margin(1e-4));
  REQUIRE(E.v_b.finite);
  CHECK(E.v_b.value == Catch::Approx(0.0).margin(1e-4));
  CHECK_FALSE(E.u_b.finite);
  CHECK_FALSE(E.dv_a.finite);  // not enterable
  CHECK_FALSE(E.du_b.finite);
  for (std::size_t i = G.core_lo; i <= G.core_hi; i += 3) {
    double w = E.v[i] * E.du[i] - E.u[i] * E.dv[i];
    REQUIRE(w == Catch::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("overflow guard reports no convergence") {
  auto G = build_grid(logistic_natural());  // caps sized for r_ref = 2
  try {
    compute_eigen(G, 400.0);
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoConvergence);
  }
}
