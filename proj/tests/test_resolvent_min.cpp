#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "feller/diffusion.hpp"
#include "feller/eigen.hpp"
#include "feller/grid.hpp"
#include "feller/resolvent_minimal.hpp"

using namespace feller;

namespace {

DiffusionSpec bm01() {
  return DiffusionSpec::make(0.0, 1.0, 0.5, ScalarFn::from_function([](double x) { return x; }),
                             ScalarFn::from_function([](double x) { return 2.0 * x; }));
}

DiffusionSpec logistic_natural() {
  auto lg = [](double x) { return std::log(x / (1.0 - x)); };
  return DiffusionSpec::make(0.0, 1.0, 0.5, ScalarFn::from_function(lg),
                             ScalarFn::from_function(lg));
}

}  // namespace

TEST_CASE("constant input, hyperbolic closed form") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  std::vector<double> one(G.size(), 1.0);
  auto R = apply_r0(G, E, one);
  // R0 1 (x) = (1/r)(1 - v(x)/v(a) - u(x)/u(b)); at x = c both ratios are
  // 1/(2 cosh(1/2))
  double mid = 2.0 * (1.0 - 1.0 / std::cosh(0.5));
  CHECK(R.values[G.ic] == Catch::Approx(mid).epsilon(1e-6));
  for (std::size_t i = G.core_lo; i <= G.core_hi; i += 11) {
    double want =
        2.0 * (1.0 - E.v[i] / E.v_a.value - E.u[i] / E.u_b.value);
    REQUIRE(R.values[i] == Catch::Approx(want).epsilon(1e-6).margin(1e-8));
  }
  // absorbed at both (regular) endpoints
  REQUIRE(R.at_a.finite);
  CHECK(R.at_a.value == Catch::Approx(0.0).margin(1e-6));
  REQUIRE(R.at_b.finite);
  CHECK(R.at_b.value == Catch::Approx(0.0).margin(1e-6));
  // D_s R0 1 (a) = 2 tanh(1/2)
  CHECK(R.ds_a == Catch::Approx(2.0 * std::tanh(0.5)).epsilon(1e-6));
  CHECK(R.ds_b == Catch::Approx(-2.0 * std::tanh(0.5)).epsilon(1e-6));
}

TEST_CASE("kernel values and symmetry") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  double want = std::sinh(0.25) * std::sinh(0.25) / std::sinh(1.0);
  CHECK(r0_kernel(G, E, 0.25, 0.75) == Catch::Approx(want).epsilon(1e-6));
  CHECK(r0_kernel(G, E, 0.75, 0.25) == Catch::Approx(want).epsilon(1e-6));
  CHECK(r0_kernel(G, E, 0.1, 0.9) ==
        Catch::Approx(std::sinh(0.1) * std::sinh(0.1) / std::sinh(1.0)).epsilon(1e-5));
}

TEST_CASE("resolvent identity at interior nodes") {
  auto G = build_grid(bm01());
  for (double r : {0.5, 2.0}) {
    auto E = compute_eigen(G, r);
    std::vector<double> g(G.size());
    for (std::size_t i = 0; i < G.size(); ++i) g[i] = G.x[i] * G.x[i];
    auto R = apply_r0(G, E, g);
    auto Lf = discrete_generator(G, R.values);
    for (std::size_t i = G.core_lo + 1; i < G.core_hi; i += 5)
      REQUIRE(r * R.values[i] - Lf[i] == Catch::Approx(g[i]).margin(1e-5));
  }
}

TEST_CASE("scale derivative is consistent with the interior table") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  std::vector<double> one(G.size(), 1.0);
  auto R = apply_r0(G, E, one);
  auto d_at = boundary_limit(G, R.ds, Endpoint::Lower);
  REQUIRE(d_at.finite);
  CHECK(d_at.value == Catch::Approx(R.ds_a).epsilon(1e-6));
}

TEST_CASE("inaccessible endpoints: no absorption") {
  auto G = build_grid(logistic_natural());
  auto E = compute_eigen(G, 0.5);
  std::vector<double> one(G.size(), 1.0);
  auto R = apply_r0(G, E, one);
  REQUIRE(R.at_a.finite);
  CHECK(R.at_a.value == Catch::Approx(2.0).epsilon(1e-3));
  REQUIRE(R.at_b.finite);
  CHECK(R.at_b.value == Catch::Approx(2.0).epsilon(1e-3));
  // conservative: R_r 1 == 1/r once nothing is lost at the ends
  for (std::size_t i = G.core_lo; i <= G.core_hi; i += 11)
    REQUIRE(R.values[i] == Catch::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("mismatched sample length is rejected") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  std::vector<double> bad(G.size() - 3, 1.0);
  try {
    apply_r0(G, E, bad);
    FAIL("expected InvalidSpec");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidSpec);
  }
}
