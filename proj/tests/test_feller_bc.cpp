#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "feller/boundary_data.hpp"
#include "feller/diffusion.hpp"
#include "feller/eigen.hpp"
#include "feller/feller_bc.hpp"
#include "feller/grid.hpp"
#include "feller/resolvent_minimal.hpp"

using namespace feller;

namespace {

DiffusionSpec bm01() {
  return DiffusionSpec::make(0.0, 1.0, 0.5, ScalarFn::from_function([](double x) { return x; }),
                             ScalarFn::from_function([](double x) { return 2.0 * x; }));
}

// lower endpoint regular, upper entrance
DiffusionSpec reg_ent() {
  return DiffusionSpec::make(
      0.0, 1.0, 0.5, ScalarFn::from_function([](double x) { return -std::log(1.0 - x); }),
      ScalarFn::from_function([](double x) { return x; }));
}

// lower endpoint natural, upper entrance
DiffusionSpec nat_ent() {
  return DiffusionSpec::make(
      0.0, 1.0, 0.5,
      ScalarFn::from_function([](double x) { return std::log(x / (1.0 - x)); }),
      ScalarFn::from_function([](double x) { return std::log(x); }));
}

// lower endpoint regular, upper natural
DiffusionSpec reg_nat() {
  return DiffusionSpec::make(
      0.0, 1.0, 0.5, ScalarFn::from_function([](double x) { return 1.0 / (1.0 - x); }),
      ScalarFn::from_function([](double x) { return x; }));
}

// lower endpoint exit, upper regular
DiffusionSpec exit_reg() {
  return DiffusionSpec::make(0.0, 1.0, 0.5,
                             ScalarFn::from_function([](double x) { return x; }),
                             ScalarFn::from_function([](double x) { return std::log(x); }));
}

PhiInput pack(const EigenSolution&, const std::vector<double>& f, double f_end, double dsf_end,
              double lf_end, double f_far) {
  PhiInput in;
  in.f = &f;
  in.f_end = f_end;
  in.dsf_end = dsf_end;
  in.lf_end = lf_end;
  in.f_far = f_far;
  return in;
}

double m_inner(const WorkGrid& G, const std::vector<double>& f, const std::vector<double>& g) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < G.size(); ++i)
    acc += 0.5 * (f[i] * g[i] + f[i + 1] * g[i + 1]) * (G.m[i + 1] - G.m[i]);
  return acc;
}

}  // namespace

TEST_CASE("boundary functional on constants") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  std::vector<double> one(G.size(), 1.0);

  FellerBoundaryData D;
  D.p1 = 0.7;
  D.p3 = 2.0;
  D.p4.atoms.push_back({0.3, 1.5});
  D.p4.endpoint_atom = 0.4;
  auto in = pack(E, one, 1.0, 0.0, 0.0, 1.0);
  CHECK(phi_a(D, G, in) == Catch::Approx(0.7).margin(1e-14));

  FellerBoundaryData Dq;
  Dq.q1 = 0.25;
  Dq.q4.atoms.push_back({0.6, 2.0});
  CHECK(phi_b(Dq, G, in) == Catch::Approx(0.25).margin(1e-14));
}

TEST_CASE("boundary functional demands the data it uses") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  std::vector<double> one(G.size(), 1.0);

  FellerBoundaryData D;
  D.p2 = 1.0;
  PhiInput in;
  in.f = &one;
  in.f_end = 1.0;
  CHECK_THROWS_AS(phi_a(D, G, in), Error);  // no scale derivative supplied
  in.dsf_end = 0.0;
  CHECK(phi_a(D, G, in) == 0.0);

  FellerBoundaryData Datom;
  Datom.p4.endpoint_atom = 1.0;
  PhiInput in2;
  in2.f = &one;
  in2.f_end = 1.0;
  CHECK_THROWS_AS(phi_a(Datom, G, in2), Error);  // no far endpoint value
}

TEST_CASE("sticky reflection exponent, closed form") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  for (double beta : {0.0, 1.0, 3.0}) {
    FellerBoundaryData D;
    D.p2 = 1.0;
    D.p3 = beta;
    CHECK(psi_ab(D, G, E) ==
          Catch::Approx(0.5 * beta + 1.0 / std::tanh(1.0)).epsilon(1e-6));
  }
}

TEST_CASE("pure stagnancy exponent is linear in the rate") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  FellerBoundaryData D;
  D.p3 = 1.75;
  CHECK(psi_ab(D, G, E) == Catch::Approx(1.75 * 0.5).epsilon(1e-9));
}

TEST_CASE("exponent grows with the rate") {
  auto G = build_grid(bm01());
  FellerBoundaryData D;
  D.p1 = 0.2;
  D.p2 = 1.0;
  D.p3 = 0.5;
  D.p4.atoms.push_back({0.5, 0.8});
  double prev = 0.0;
  for (double r : {0.25, 0.5, 1.0, 2.0}) {
    auto E = compute_eigen(G, r);
    double cur = psi_ab(D, G, E);
    REQUIRE(cur > prev);
    prev = cur;
  }
}

TEST_CASE("exponent needs an accessible endpoint") {
  auto G = build_grid(nat_ent());
  auto E = compute_eigen(G, 0.5);
  FellerBoundaryData D;
  D.p3 = 1.0;
  CHECK_THROWS_AS(psi_ab(D, G, E), Error);
}

TEST_CASE("hitting transform, closed forms") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);

  FellerBoundaryData Drefl;
  Drefl.p2 = 1.0;
  CHECK(hitting_transform(Drefl, G, E) == Catch::Approx(1.0 / std::sinh(1.0)).epsilon(1e-6));

  FellerBoundaryData Djump;
  Djump.p4.atoms.push_back({0.5, 2.0});
  // w u(x)/u(b) = 2 sinh(1/2)/sinh(1)
  CHECK(hitting_transform(Djump, G, E) ==
        Catch::Approx(2.0 * std::sinh(0.5) / std::sinh(1.0)).epsilon(1e-6));

  FellerBoundaryData Dkill;
  Dkill.p1 = 1.0;
  CHECK(hitting_transform(Dkill, G, E) == Catch::Approx(0.0).margin(1e-9));

  auto G2 = build_grid(reg_ent());
  auto E2 = compute_eigen(G2, 0.5);
  CHECK_THROWS_AS(hitting_transform(Drefl, G2, E2), Error);
}

TEST_CASE("excursion payoff functional") {
  auto G = build_grid(bm01());
  auto k = make_kernel(G, 0.5);
  std::vector<double> one(G.size(), 1.0), zero(G.size(), 0.0);

  FellerBoundaryData Drefl;
  Drefl.p2 = 1.0;
  CHECK(n_functional(Drefl, k, one, 1.0) == Catch::Approx(2.0 * std::tanh(0.5)).epsilon(1e-6));
  CHECK(n_functional(Drefl, k, zero, 0.0) == Catch::Approx(0.0).margin(1e-10));

  FellerBoundaryData Dstag;
  Dstag.p3 = 0.8;
  CHECK(n_functional(Dstag, k, one, 1.0) == Catch::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("endpoint matrix for pure stagnancy is diagonal") {
  auto G = build_grid(bm01());
  for (double r : {0.5, 2.0}) {
    auto E = compute_eigen(G, r);
    FellerBoundaryData D;
    D.p3 = 1.0;
    D.q3 = 1.0;
    auto A = matrix_A(D, G, E);
    CHECK(A[0] == Catch::Approx(r).epsilon(1e-9));
    CHECK(A[3] == Catch::Approx(r).epsilon(1e-9));
    CHECK(std::fabs(A[1]) < 1e-9);
    CHECK(std::fabs(A[2]) < 1e-9);
  }
}

TEST_CASE("endpoint matrix signs and determinant") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  FellerBoundaryData D;
  D.p2 = 1.0;
  D.p3 = 1.0;
  D.p4.atoms.push_back({0.6, 0.5});
  D.q2 = 1.0;
  D.q3 = 0.25;
  D.q4.atoms.push_back({0.3, 0.7});
  auto A = matrix_A(D, G, E);
  CHECK(A[0] > 0.0);
  CHECK(A[3] > 0.0);
  CHECK(A[1] <= 0.0);
  CHECK(A[2] <= 0.0);
  CHECK(A[0] * A[3] - A[1] * A[2] > 0.0);

  FellerBoundaryData Z;
  CHECK_THROWS_AS(matrix_A(Z, G, E), Error);
}

TEST_CASE("two-sided extension conserves mass") {
  auto G = build_grid(bm01());
  for (double r : {0.5, 2.0}) {
    auto E = compute_eigen(G, r);
    std::vector<double> one(G.size(), 1.0);
    FellerBoundaryData D;
    D.p2 = 1.0;
    D.p3 = 1.0;
    D.p4.atoms.push_back({0.7, 0.3});
    D.p4.has_density = true;
    D.p4.density = ScalarFn::constant(0.2);
    D.p4.support_lo = 0.2;
    D.p4.support_hi = 0.8;
    D.q2 = 1.0;
    D.q3 = 0.5;
    D.q4.atoms.push_back({0.4, 0.2});
    auto R = extended_resolvent(D, G, E, one, 1.0, 1.0);
    CHECK(R.tag == CaseTag::Four);
    CHECK(R.row_a_is_phi);
    CHECK(R.row_b_is_phi);
    CHECK(r * R.at_a == Catch::Approx(1.0).margin(1e-4));
    CHECK(r * R.at_b == Catch::Approx(1.0).margin(1e-4));
    for (std::size_t i = G.core_lo; i <= G.core_hi; i += 9)
      REQUIRE(r * R.values[i] == Catch::Approx(1.0).margin(1e-4));
  }
}

TEST_CASE("instant killing pins both endpoint values to zero") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  std::vector<double> g(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) g[i] = 1.0 + G.x[i] * G.x[i];
  FellerBoundaryData D;
  D.p1 = 1.0;
  D.q1 = 1.0;
  auto R = extended_resolvent(D, G, E, g, g.front(), g.back());
  CHECK(R.at_a == 0.0);
  CHECK(R.at_b == 0.0);
  auto R0 = apply_r0(G, E, g);
  for (std::size_t i = 0; i < G.size(); i += 17)
    REQUIRE(R.values[i] == Catch::Approx(R0.values[i]).margin(1e-12));
}

TEST_CASE("sticky lower endpoint with killed upper endpoint, closed form") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  std::vector<double> one(G.size(), 1.0);
  FellerBoundaryData D;
  D.p2 = 1.0;
  D.p3 = 1.0;
  D.q1 = 1.0;
  auto R = extended_resolvent(D, G, E, one, 1.0, 1.0);
  double want_a = (1.0 + 2.0 * std::tanh(0.5)) / (0.5 + 1.0 / std::tanh(1.0));
  CHECK(R.at_a == Catch::Approx(want_a).epsilon(1e-6));
  CHECK(R.at_b == Catch::Approx(0.0).margin(1e-9));
  // interior value through the same decomposition the solver used
  auto R0 = apply_r0(G, E, one);
  std::size_t i = G.ic;
  CHECK(R.values[i] ==
        Catch::Approx(R0.values[i] + R.at_a * E.v[i] / E.v_a.value).margin(1e-12));
}

TEST_CASE("solver rows match the scalar functionals") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  auto k = make_kernel(G, 0.5);
  std::vector<double> g(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) g[i] = std::exp(G.x[i]);
  FellerBoundaryData D;
  D.p1 = 0.1;
  D.p2 = 1.0;
  D.p3 = 0.5;
  D.p4.atoms.push_back({0.6, 0.4});
  D.q2 = 1.0;
  D.q3 = 1.0;
  auto R = extended_resolvent(D, G, E, g, g.front(), g.back());
  double lhs = psi_ab(D, G, E) * R.at_a;
  double rhs = n_functional(D, k, g, g.front()) + hitting_transform(D, G, E) * R.at_b;
  CHECK(lhs == Catch::Approx(rhs).margin(1e-10));
  CHECK(R.residual_a < 1e-10);
  CHECK(R.residual_b < 1e-10);
}

TEST_CASE("resolvent equation across two rates") {
  auto G = build_grid(bm01());
  auto E1 = compute_eigen(G, 0.5);
  auto E2 = compute_eigen(G, 2.0);
  std::vector<double> g(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) g[i] = 1.0 + G.x[i] * G.x[i];
  FellerBoundaryData D;
  D.p2 = 1.0;
  D.p3 = 1.0;
  D.q1 = 1.0;
  auto Rb = extended_resolvent(D, G, E2, g, g.front(), g.back());
  auto Ra = extended_resolvent(D, G, E1, g, g.front(), g.back());
  auto Rab = extended_resolvent(D, G, E1, Rb.values, Rb.at_a, Rb.at_b);
  for (std::size_t i = G.core_lo; i <= G.core_hi; i += 13)
    REQUIRE(Ra.values[i] - Rb.values[i] ==
            Catch::Approx((2.0 - 0.5) * Rab.values[i]).margin(1e-5));
  CHECK(Ra.at_a - Rb.at_a == Catch::Approx(1.5 * Rab.at_a).margin(1e-5));
}

TEST_CASE("one attached inaccessible endpoint, sticky jump data") {
  auto G = build_grid(reg_ent());
  auto E = compute_eigen(G, 0.5);
  REQUIRE(E.v_a.finite);
  REQUIRE_FALSE(E.u_b.finite);
  std::vector<double> one(G.size(), 1.0);
  FellerBoundaryData D;
  D.p2 = 1.0;
  D.p3 = 0.5;
  D.q3 = 1.0;
  D.q4.atoms.push_back({0.5, 0.4});
  D.q4.endpoint_atom = 0.25;
  auto R = extended_resolvent(D, G, E, one, 1.0, 1.0);
  CHECK(R.tag == CaseTag::Two);
  CHECK(R.row_b_is_phi);
  CHECK(0.5 * R.at_a == Catch::Approx(1.0).margin(1e-4));
  CHECK(0.5 * R.at_b == Catch::Approx(1.0).margin(1e-4));
  for (std::size_t i = G.core_lo; i <= G.core_hi; i += 23)
    REQUIRE(0.5 * R.values[i] == Catch::Approx(1.0).margin(1e-4));
}

TEST_CASE("jump onto an inert entrance endpoint re-enters") {
  auto G = build_grid(reg_ent());
  auto E = compute_eigen(G, 0.5);
  std::vector<double> one(G.size(), 1.0);
  FellerBoundaryData D;
  D.p2 = 1.0;
  D.p4.endpoint_atom = 0.3;
  D.b_irregular = true;
  auto R = extended_resolvent(D, G, E, one, 1.0, 1.0);
  CHECK(R.tag == CaseTag::Two);
  CHECK_FALSE(R.row_b_is_phi);
  CHECK(0.5 * R.at_a == Catch::Approx(1.0).margin(1e-4));
  CHECK(0.5 * R.at_b == Catch::Approx(1.0).margin(1e-4));

  // continuity at the attached endpoint is part of the solution
  std::vector<double> g(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) g[i] = G.x[i];
  auto Rg = extended_resolvent(D, G, E, g, 0.0, 1.0);
  auto lim = boundary_limit(G, Rg.values, Endpoint::Upper);
  REQUIRE(lim.finite);
  CHECK(Rg.at_b == Catch::Approx(lim.value).margin(1e-5));
}

TEST_CASE("detached natural endpoint leaves the minimal resolvent alone") {
  auto G = build_grid(reg_nat());
  auto E = compute_eigen(G, 0.5);
  std::vector<double> g(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) g[i] = 1.0 + 0.5 * G.x[i];
  FellerBoundaryData D;
  D.p2 = 1.0;
  D.p3 = 1.0;
  auto R = extended_resolvent(D, G, E, g, 1.0, 1.5);
  CHECK(R.tag == CaseTag::One);
  CHECK(R.row_a_is_phi);
  CHECK_FALSE(R.row_b_is_phi);
  auto R0 = apply_r0(G, E, g);
  REQUIRE(R0.at_b.finite);
  CHECK(R.at_b == Catch::Approx(R0.at_b.value).margin(1e-12));
}

TEST_CASE("both endpoints inaccessible, data on the natural side") {
  auto G = build_grid(nat_ent());
  auto E = compute_eigen(G, 0.5);
  REQUIRE_FALSE(E.v_a.finite);
  REQUIRE_FALSE(E.u_b.finite);
  std::vector<double> one(G.size(), 1.0);
  FellerBoundaryData D;
  D.p1 = 0.2;
  D.p3 = 1.0;
  D.p4.atoms.push_back({0.6, 0.8});
  D.b_irregular = true;
  auto R = extended_resolvent(D, G, E, one, 1.0, 1.0);
  CHECK(R.tag == CaseTag::Three);
  auto R0 = apply_r0(G, E, one);
  // interior motion never reaches either endpoint
  for (std::size_t i = G.core_lo; i <= G.core_hi; i += 31)
    REQUIRE(R.values[i] == Catch::Approx(R0.values[i]).margin(1e-12));
  // one-shot holding formula at the lower endpoint
  double r0_at_jump = G.interp(R0.values, 0.6);
  double want = (1.0 * 1.0 + 0.8 * r0_at_jump) / (0.2 + 1.0 * 0.5 + 0.8);
  CHECK(R.at_a == Catch::Approx(want).margin(1e-10));
  REQUIRE(R0.at_b.finite);
  CHECK(R.at_b == Catch::Approx(R0.at_b.value).margin(1e-12));

  // with killing removed the holding formula conserves mass
  FellerBoundaryData Dc = D;
  Dc.p1 = 0.0;
  auto Rc = extended_resolvent(Dc, G, E, one, 1.0, 1.0);
  CHECK(0.5 * Rc.at_a == Catch::Approx(1.0).margin(1e-4));
  CHECK(0.5 * Rc.at_b == Catch::Approx(1.0).margin(1e-4));
}

TEST_CASE("declared case must match the derived one") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  std::vector<double> one(G.size(), 1.0);
  FellerBoundaryData D;
  D.p3 = 1.0;
  D.q3 = 1.0;
  CHECK_THROWS_AS(extended_resolvent(D, G, E, one, 1.0, 1.0, CaseTag::Two), Error);
  D.case_tag = CaseTag::One;
  CHECK_THROWS_AS(extended_resolvent(D, G, E, one, 1.0, 1.0), Error);
}

TEST_CASE("empty data on an accessible endpoint is singular") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  std::vector<double> one(G.size(), 1.0);
  FellerBoundaryData Z;
  CHECK_THROWS_AS(extended_resolvent(Z, G, E, one, 1.0, 1.0), Error);
}

TEST_CASE("non-finite input is rejected") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  std::vector<double> g(G.size(), 1.0);
  g[G.ic] = std::numeric_limits<double>::infinity();
  FellerBoundaryData D;
  D.p3 = 1.0;
  D.q3 = 1.0;
  CHECK_THROWS_AS(extended_resolvent(D, G, E, g, 1.0, 1.0), Error);
}

TEST_CASE("minimal kernel guards") {
  auto G = build_grid(bm01());
  auto k = make_kernel(G, 0.5);
  CHECK_THROWS_AS(kernel_at(k, 0.0, 0.5), Error);
  CHECK_THROWS_AS(kernel_at(k, 0.5, 1.0), Error);
  std::vector<double> g(G.size(), 1.0);
  g[G.ic] = 1e13;
  CHECK_THROWS_AS(apply_minimal(k, g), Error);
}

TEST_CASE("generator pair identity on the minimal resolvent") {
  auto G = build_grid(bm01());
  auto k = make_kernel(G, 0.5);
  std::vector<double> f(G.size()), lf(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) {
    double x = G.x[i];
    f[i] = x * (1.0 - x);
    lf[i] = -1.0;
  }
  auto rep = rl_formula(k, f, lf, 0.0, 0.0);
  CHECK(rep.max_discrepancy < 1e-4);

  // shifted pair exercises both endpoint terms
  for (std::size_t i = 0; i < G.size(); ++i) f[i] += 1.0;
  auto rep2 = rl_formula(k, f, lf, 1.0, 1.0);
  CHECK(rep2.max_discrepancy < 1e-4);

  std::vector<double> c(G.size(), 2.0), zero(G.size(), 0.0);
  auto rep3 = rl_formula(k, c, zero, 2.0, 2.0);
  CHECK(rep3.max_discrepancy < 1e-6);

  // a kink is not in the generator domain
  std::vector<double> kink(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) kink[i] = std::fabs(G.x[i] - 0.5);
  CHECK_THROWS_AS(rl_formula(k, kink, zero, 0.5, 0.5), Error);
}

TEST_CASE("minimal resolvent symmetry and positivity") {
  auto G = build_grid(bm01());
  auto k = make_kernel(G, 0.5);
  std::vector<double> g(G.size()), h(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) {
    double x = G.x[i];
    g[i] = std::exp(x);
    h[i] = 1.0 + std::cos(3.0 * x);
  }
  auto Rg = apply_minimal(k, g);
  auto Rh = apply_minimal(k, h);
  CHECK(m_inner(G, Rg.values, h) == Catch::Approx(m_inner(G, g, Rh.values)).epsilon(1e-5));
  for (double x : {0.1, 0.35, 0.5, 0.9})
    REQUIRE(G.interp(Rh.values, x) >= -1e-12);
}

TEST_CASE("domain check accepts the solver output") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  std::vector<double> g(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) g[i] = 1.0 + G.x[i] * G.x[i];
  FellerBoundaryData D;
  D.p2 = 1.0;
  D.p3 = 1.0;
  D.q1 = 1.0;
  auto R = extended_resolvent(D, G, E, g, g.front(), g.back());
  DomainCheckInput in;
  in.f = R.values;
  in.lf.resize(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) in.lf[i] = 0.5 * R.values[i] - g[i];
  in.f_a = R.at_a;
  in.f_b = R.at_b;
  in.lf_a = 0.5 * R.at_a - g.front();
  in.lf_b = 0.5 * R.at_b - g.back();
  in.tol = 1e-4;
  auto rep = generator_domain_check(D, G, E, in);
  CHECK(rep.verdict);
}

TEST_CASE("domain check rejects a reflected linear function") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  FellerBoundaryData D;
  D.p2 = 1.0;
  D.p3 = 1.0;
  D.q2 = 1.0;
  DomainCheckInput in;
  in.f.resize(G.size());
  in.lf.assign(G.size(), 0.0);
  for (std::size_t i = 0; i < G.size(); ++i) in.f[i] = G.x[i];
  in.f_a = 0.0;
  in.f_b = 1.0;
  in.lf_a = 0.0;
  in.lf_b = 0.0;
  auto rep = generator_domain_check(D, G, E, in);
  CHECK_FALSE(rep.verdict);
  bool found = false;
  for (const auto& item : rep.items)
    if (item.name == "phi-a") {
      found = true;
      CHECK(item.residual == Catch::Approx(-1.0).margin(1e-4));
    }
  REQUIRE(found);
}

TEST_CASE("domain check accepts constants under conservative data") {
  auto G = build_grid(bm01());
  auto E = compute_eigen(G, 0.5);
  FellerBoundaryData D;
  D.p2 = 1.0;
  D.q2 = 1.0;
  D.q3 = 0.5;
  DomainCheckInput in;
  in.f.assign(G.size(), 3.0);
  in.lf.assign(G.size(), 0.0);
  in.f_a = 3.0;
  in.f_b = 3.0;
  auto rep = generator_domain_check(D, G, E, in);
  CHECK(rep.verdict);
}

TEST_CASE("validation accepts conservative two-sided data") {
  auto spec = bm01();
  FellerBoundaryData D;
  D.p2 = 1.0;
  D.p3 = 1.0;
  D.p4.atoms.push_back({0.7, 0.3});
  D.q2 = 1.0;
  D.q3 = 0.5;
  auto rep = validate(D, spec);
  CHECK(rep.ok);
}

TEST_CASE("validation flags a trapping endpoint") {
  auto spec = bm01();
  FellerBoundaryData D;
  D.p2 = 1.0;
  D.p3 = 1.0;
  D.q1 = 1.0;  // killing only: the upper endpoint would trap the process
  auto rep = validate_report(D, spec);
  CHECK_FALSE(rep.ok);
  bool named = false;
  for (const auto& item : rep.items)
    if (item.name == "qcond2" && !item.pass) named = true;
  CHECK(named);
  CHECK_THROWS_AS(validate(D, spec), Error);
}

TEST_CASE("validation rejects reflection off a non-regular endpoint") {
  auto spec = exit_reg();
  auto cls = classify_boundary(spec, Endpoint::Lower);
  REQUIRE(cls.accessible);
  REQUIRE_FALSE(cls.enterable);
  FellerBoundaryData D;
  D.p2 = 1.0;
  D.q2 = 1.0;
  auto rep = validate_report(D, spec);
  CHECK_FALSE(rep.ok);
  bool named = false;
  for (const auto& item : rep.items)
    if (item.name == "p2-regular" && !item.pass) named = true;
  CHECK(named);
}

TEST_CASE("validation rejects a jump measure too heavy near the endpoint") {
  auto spec = bm01();
  FellerBoundaryData D;
  D.p3 = 1.0;
  D.p4.has_density = true;
  D.p4.density = ScalarFn::from_function([](double x) { return 1.0 / (x * x); });
  D.p4.support_lo = 0.0;
  D.p4.support_hi = 0.5;
  D.q2 = 1.0;
  auto rep = validate_report(D, spec);
  CHECK_FALSE(rep.ok);
  bool named = false;
  for (const auto& item : rep.items)
    if (item.name == "pcond1" && !item.pass) named = true;
  CHECK(named);
}

TEST_CASE("validation checks stagnancy at attached inert endpoints") {
  auto spec = nat_ent();
  FellerBoundaryData D;
  D.p1 = 0.2;  // data at the natural endpoint but no stagnancy
  D.p4.atoms.push_back({0.6, 0.8});
  auto rep = validate_report(D, spec);
  CHECK_FALSE(rep.ok);
  bool named = false;
  for (const auto& item : rep.items)
    if (item.name == "p3-inaccessible" && !item.pass) named = true;
  CHECK(named);
  D.p3 = 1.0;
  CHECK(validate_report(D, spec).ok);
}

TEST_CASE("validation ties the irregular flag to an inert entrance endpoint") {
  auto spec = reg_ent();
  FellerBoundaryData D;
  D.p2 = 1.0;
  D.b_irregular = true;
  CHECK(validate_report(D, spec).ok);
  D.q3 = 1.0;  // own data contradicts the flag
  auto rep = validate_report(D, spec);
  CHECK_FALSE(rep.ok);

  auto spec2 = reg_nat();
  FellerBoundaryData D2;
  D2.p2 = 1.0;
  D2.b_irregular = true;  // natural endpoint cannot re-enter
  CHECK_FALSE(validate_report(D2, spec2).ok);
}

TEST_CASE("validation rejects atoms targeting a natural endpoint") {
  auto spec = reg_nat();
  FellerBoundaryData D;
  D.p2 = 1.0;
  D.p4.endpoint_atom = 0.5;
  auto rep = validate_report(D, spec);
  CHECK_FALSE(rep.ok);
  bool named = false;
  for (const auto& item : rep.items)
    if (item.name == "atom-target-b" && !item.pass) named = true;
  CHECK(named);

  auto spec2 = reg_ent();
  FellerBoundaryData D2;
  D2.p2 = 1.0;
  D2.p4.endpoint_atom = 0.5;
  D2.b_irregular = true;
  CHECK(validate_report(D2, spec2).ok);
}

TEST_CASE("validation checks the declared case tag") {
  auto spec = bm01();
  FellerBoundaryData D;
  D.p3 = 1.0;
  D.q3 = 1.0;
  D.case_tag = CaseTag::Two;
  auto rep = validate_report(D, spec);
  CHECK_FALSE(rep.ok);
  D.case_tag = CaseTag::Four;
  CHECK(validate_report(D, spec).ok);
}
