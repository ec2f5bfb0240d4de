#ifndef FELLER_FELLER_BC_HPP
#define FELLER_FELLER_BC_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "feller/boundary_data.hpp"
#include "feller/diffusion.hpp"
#include "feller/eigen.hpp"
#include "feller/errors.hpp"
#include "feller/grid.hpp"
#include "feller/resolvent_minimal.hpp"

namespace feller {

/// Function package for the boundary functionals: grid samples plus the
/// endpoint data the functional actually needs. Entries left NaN are
/// treated as missing and only raise when a nonzero coefficient hits them.
struct PhiInput {
  const std::vector<double>* f = nullptr;
  double f_end = std::numeric_limits<double>::quiet_NaN();
  double dsf_end = std::numeric_limits<double>::quiet_NaN();
  double lf_end = std::numeric_limits<double>::quiet_NaN();
  double f_far = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double need(double x, const char* what) {
  if (!std::isfinite(x))
    raise(Errc::MissingEndpointData, std::string("boundary functional needs ") + what);
  return x;
}

// c1 f0 + dsgn c2 D_sf + c3 Lf - int (f - f0) dmu, with the far atom of mu
// evaluated against f_far.
inline double phi_side(const WorkGrid& G, double c1, double c2, double c3,
                       const BoundaryMeasure& mu, const PhiInput& in, double dsgn) {
  double out = 0.0;
  const bool needs_f0 = c1 > 0.0 || !mu.interior_empty() || mu.endpoint_atom > 0.0;
  double f0 = needs_f0 ? need(in.f_end, "the endpoint value") : 0.0;
  if (c1 > 0.0) out += c1 * f0;
  if (c2 > 0.0) out += dsgn * c2 * need(in.dsf_end, "the endpoint scale derivative");
  if (c3 > 0.0) out += c3 * need(in.lf_end, "the endpoint generator value");
  if (!mu.interior_empty()) {
    if (in.f == nullptr)
      raise(Errc::MissingEndpointData, "boundary functional needs grid samples");
    MeasureSums s = measure_sums(G, *in.f, mu);
    out -= s.integral - f0 * s.mass;
  }
  if (mu.endpoint_atom > 0.0)
    out -= mu.endpoint_atom * (need(in.f_far, "the far endpoint value") - f0);
  return out;
}

}  // namespace detail

inline double phi_a(const FellerBoundaryData& D, const WorkGrid& G, const PhiInput& in) {
  return detail::phi_side(G, D.p1, D.p2, D.p3, D.p4, in, -1.0);
}

inline double phi_b(const FellerBoundaryData& D, const WorkGrid& G, const PhiInput& in) {
  return detail::phi_side(G, D.q1, D.q2, D.q3, D.q4, in, +1.0);
}

/// Laplace exponent of the inverse local time at a for the process stopped
/// at b: Phi_a(v_r)/v_r(a).
inline double psi_ab(const FellerBoundaryData& D, const WorkGrid& G, const EigenSolution& E) {
  if (!E.v_a.finite) raise(Errc::InaccessibleBoundary, "lower endpoint is not accessible");
  PhiInput in;
  in.f = &E.v;
  in.f_end = E.v_a.value;
  if (E.dv_a.finite) in.dsf_end = E.dv_a.value;
  in.lf_end = E.r * E.v_a.value;
  in.f_far = E.v_b.value;
  return phi_a(D, G, in) / E.v_a.value;
}

inline double psi_ba(const FellerBoundaryData& D, const WorkGrid& G, const EigenSolution& E) {
  if (!E.u_b.finite) raise(Errc::InaccessibleBoundary, "upper endpoint is not accessible");
  PhiInput in;
  in.f = &E.u;
  in.f_end = E.u_b.value;
  if (E.du_b.finite) in.dsf_end = E.du_b.value;
  in.lf_end = E.r * E.u_b.value;
  in.f_far = E.u_a.value;
  return phi_b(D, G, in) / E.u_b.value;
}

/// Excursion transform n_a^(b)[e^{-rT_b}; T_b finite] = -Phi_a(u_r)/u_r(b).
inline double hitting_transform(const FellerBoundaryData& D, const WorkGrid& G,
                                const EigenSolution& E) {
  if (!E.v_a.finite || !E.u_b.finite)
    raise(Errc::InaccessibleBoundary, "both endpoints must be accessible");
  PhiInput in;
  in.f = &E.u;
  in.f_end = E.u_a.value;
  in.dsf_end = E.du_a.value;
  in.lf_end = E.r * E.u_a.value;
  in.f_far = E.u_b.value;
  return -phi_a(D, G, in) / E.u_b.value;
}

inline double hitting_transform_b(const FellerBoundaryData& D, const WorkGrid& G,
                                  const EigenSolution& E) {
  if (!E.v_a.finite || !E.u_b.finite)
    raise(Errc::InaccessibleBoundary, "both endpoints must be accessible");
  PhiInput in;
  in.f = &E.v;
  in.f_end = E.v_b.value;
  in.dsf_end = E.dv_b.value;
  in.lf_end = E.r * E.v_b.value;
  in.f_far = E.v_a.value;
  return -phi_b(D, G, in) / E.v_a.value;
}

/// Excursion functional N_{a,r}(g) = -Phi_a(R0 g): the stagnancy term plus
/// the discounted integral of g over one generic excursion, run to its end.
/// The far atom pairs with the minimal resolvent's own limit there, so a
/// jump to an entrance endpoint carries the re-entry payoff while a jump to
/// an accessible endpoint carries none.
inline double n_functional(const FellerBoundaryData& D, const ResolventKernel& k,
                           const std::vector<double>& g, double g_a) {
  const WorkGrid& G = *k.grid;
  const EigenSolution& E = k.eig;
  R0Apply R0 = apply_minimal(k, g);
  PhiInput in;
  in.f = &R0.values;
  in.f_end = R0.at_a.value;
  in.dsf_end = R0.ds_a;
  in.lf_end = E.r * R0.at_a.value - (D.p3 > 0.0 ? detail::need(g_a, "g at the endpoint") : 0.0);
  in.f_far = R0.at_b.finite ? R0.at_b.value : 0.0;
  return -phi_a(D, G, in);
}

/// Case-4 coefficient matrix [[Phi_a(v)/v(a), Phi_a(u)/u(b)],
///                            [Phi_b(v)/v(a), Phi_b(u)/u(b)]], row-major.
inline std::array<double, 4> matrix_A(const FellerBoundaryData& D, const WorkGrid& G,
                                      const EigenSolution& E) {
  if (!E.v_a.finite || !E.u_b.finite)
    raise(Errc::InaccessibleBoundary, "both endpoints must be accessible");
  std::array<double, 4> A{psi_ab(D, G, E), -hitting_transform(D, G, E),
                          -hitting_transform_b(D, G, E), psi_ba(D, G, E)};
  double det = A[0] * A[3] - A[1] * A[2];
  if (!(std::fabs(det) > 1e-12))
    raise(Errc::SingularSystem, "boundary matrix is singular; invalid data slipped through");
  return A;
}

/// One row of the 2x2 endpoint system: ca * R(a) + cb * R(b) = rhs.
struct BoundaryRow {
  double ca = 0.0, cb = 0.0, rhs = 0.0;
  bool is_phi = false;  // false: continuity row at an inert endpoint
};

struct ExtendedResolvent {
  double r = 0.0;
  std::vector<double> values;
  double at_a = 0.0, at_b = 0.0;
  double det = 0.0;
  double psi_a = 0.0, psi_b = 0.0;  // diagonal row coefficients
  bool row_a_is_phi = false, row_b_is_phi = false;
  double residual_a = 0.0, residual_b = 0.0;
  CaseTag tag = CaseTag::Auto;
};

namespace detail {

// Phi-row at the lower endpoint, linear in (R(a), R(b)) through the Dynkin
// decomposition R = R0g + R(a) v/v(a) + R(b) u/u(b), where a ratio against a
// divergent endpoint value is identically zero and the endpoint generator
// value rides the substitution L R = r R - g.
inline BoundaryRow phi_row_a(const FellerBoundaryData& D, const WorkGrid& G,
                             const EigenSolution& E, const R0Apply& R0, double g_a) {
  const bool accA = E.v_a.finite, accB = E.u_b.finite;
  BoundaryRow row;
  row.is_phi = true;
  MeasureSums v4{0.0, 0.0}, u4{0.0, 0.0}, r04{0.0, 0.0};
  if (!D.p4.interior_empty()) {
    v4 = measure_sums(G, E.v, D.p4);
    u4 = measure_sums(G, E.u, D.p4);
    r04 = measure_sums(G, R0.values, D.p4);
  }
  const double p4b = D.p4.endpoint_atom;
  row.ca = D.p1 + D.p3 * E.r + v4.mass + p4b;
  if (accA) row.ca -= v4.integral / E.v_a.value;
  if (D.p2 > 0.0) {
    if (!E.dv_a.finite)
      raise(Errc::InvalidBoundaryData, "reflection coefficient at a non-regular endpoint");
    row.ca -= D.p2 * E.dv_a.value / E.v_a.value;
  }
  row.cb = -p4b;
  if (accB) row.cb -= (D.p2 * E.du_a.value + u4.integral) / E.u_b.value;
  row.rhs = D.p2 * R0.ds_a + r04.integral;
  if (D.p3 > 0.0) row.rhs += D.p3 * need(g_a, "g at the lower endpoint");
  return row;
}

inline BoundaryRow phi_row_b(const FellerBoundaryData& D, const WorkGrid& G,
                             const EigenSolution& E, const R0Apply& R0, double g_b) {
  const bool accA = E.v_a.finite, accB = E.u_b.finite;
  BoundaryRow row;
  row.is_phi = true;
  MeasureSums v4{0.0, 0.0}, u4{0.0, 0.0}, r04{0.0, 0.0};
  if (!D.q4.interior_empty()) {
    v4 = measure_sums(G, E.v, D.q4);
    u4 = measure_sums(G, E.u, D.q4);
    r04 = measure_sums(G, R0.values, D.q4);
  }
  const double q4a = D.q4.endpoint_atom;
  row.cb = D.q1 + D.q3 * E.r + u4.mass + q4a;
  if (accB) row.cb -= u4.integral / E.u_b.value;
  if (D.q2 > 0.0) {
    if (!E.du_b.finite)
      raise(Errc::InvalidBoundaryData, "reflection coefficient at a non-regular endpoint");
    row.cb += D.q2 * E.du_b.value / E.u_b.value;
  }
  row.ca = -q4a;
  if (accA) row.ca -= (D.q2 * (-E.dv_b.value) + v4.integral) / E.v_a.value;
  row.rhs = -D.q2 * R0.ds_b + r04.integral;
  if (D.q3 > 0.0) row.rhs += D.q3 * need(g_b, "g at the upper endpoint");
  return row;
}

}  // namespace detail

/// Resolvent of the extension determined by the boundary data, evaluated on
/// the working grid plus the two endpoint values. Each endpoint contributes
/// one linear row: its Phi functional when the endpoint is accessible or
/// carries data of its own, else the continuity row pinning the endpoint
/// value to the interior limit. values[] holds the interior (Dynkin)
/// formula; at an endpoint where the extension genuinely jumps in, at_a /
/// at_b may differ from the interior limit.
inline ExtendedResolvent extended_resolvent(const FellerBoundaryData& D, const WorkGrid& G,
                                            const EigenSolution& E, const std::vector<double>& g,
                                            double g_a, double g_b,
                                            CaseTag declared = CaseTag::Auto) {
  for (double gi : g)
    if (!std::isfinite(gi)) raise(Errc::UnboundedIntegrand, "right-hand side is not finite");
  const bool accA = E.v_a.finite, accB = E.u_b.finite;
  CaseTag tag = derive_case(D, accA, accB);
  if (declared == CaseTag::Auto) declared = D.case_tag;
  if (declared != CaseTag::Auto && declared != tag)
    raise(Errc::CaseMismatch, std::string("declared case ") + case_name(declared) +
                                  " but boundary classes give case " + case_name(tag));

  R0Apply R0 = apply_r0(G, E, g);
  if (!R0.at_a.finite || !R0.at_b.finite)
    raise(Errc::NoConvergence, "minimal resolvent endpoint limit did not settle");

  BoundaryRow row_a, row_b;
  if (accA || (D.a_side_active() && !D.a_irregular))
    row_a = detail::phi_row_a(D, G, E, R0, g_a);
  else {
    row_a.ca = 1.0;
    row_a.cb = accB && E.u_a.finite ? -E.u_a.value / E.u_b.value : 0.0;
    row_a.rhs = R0.at_a.value;
  }
  if (accB || (D.b_side_active() && !D.b_irregular))
    row_b = detail::phi_row_b(D, G, E, R0, g_b);
  else {
    row_b.cb = 1.0;
    row_b.ca = accA && E.v_b.finite ? -E.v_b.value / E.v_a.value : 0.0;
    row_b.rhs = R0.at_b.value;
  }

  ExtendedResolvent out;
  out.r = E.r;
  out.tag = tag;
  out.row_a_is_phi = row_a.is_phi;
  out.row_b_is_phi = row_b.is_phi;
  out.psi_a = row_a.ca;
  out.psi_b = row_b.cb;
  out.det = row_a.ca * row_b.cb - row_a.cb * row_b.ca;
  if (!(std::fabs(out.det) > 1e-12))
    raise(Errc::SingularSystem, "endpoint system is singular; invalid data slipped through");
  const double Ra = (row_a.rhs * row_b.cb - row_a.cb * row_b.rhs) / out.det;
  const double Rb = (row_a.ca * row_b.rhs - row_a.rhs * row_b.ca) / out.det;
  out.at_a = Ra;
  out.at_b = Rb;
  out.residual_a = std::fabs(row_a.ca * Ra + row_a.cb * Rb - row_a.rhs);
  out.residual_b = std::fabs(row_b.ca * Ra + row_b.cb * Rb - row_b.rhs);

  const std::size_t n = G.size();
  out.values.resize(n);
  const double wa = accA ? Ra / E.v_a.value : 0.0;
  const double wb = accB ? Rb / E.u_b.value : 0.0;
  for (std::size_t i = 0; i < n; ++i)
    out.values[i] = R0.values[i] + wa * E.v[i] + wb * E.u[i];
  return out;
}

/// Report-only membership check of a claimed generator pair (f, Lf) against
/// the domain characterization: the endpoint functionals, continuity of the
/// endpoint values against the interior limits, and the vanishing scale
/// slope at an entrance endpoint.
struct DomainCheckItem {
  std::string name;
  bool pass = true;
  double residual = 0.0;
};

struct DomainReport {
  std::vector<DomainCheckItem> items;
  bool verdict = true;

  void add(std::string name, bool pass, double residual) {
    items.push_back({std::move(name), pass, residual});
    verdict = verdict && pass;
  }
};

struct DomainCheckInput {
  std::vector<double> f, lf;
  double f_a = 0.0, f_b = 0.0;
  double lf_a = 0.0, lf_b = 0.0;
  double tol = 1e-6;
};

namespace detail {

// boundary_limit with a caller-supplied noise floor: anchor increments the
// consuming check cannot resolve count as settled, not divergent (slopes of
// numerically computed domain members sit on quadrature noise)
inline BoundaryLimit slope_limit(const WorkGrid& G, const std::vector<double>& f, Endpoint ep,
                                 double floor) {
  const std::vector<std::size_t>& anchors = ep == Endpoint::Lower ? G.anchors_a : G.anchors_b;
  if (anchors.size() < 3) raise(Errc::GridTooCoarse, "need at least three dyadic anchors");
  const std::size_t J = anchors.size() - 1;
  double vJ = f[anchors[J]], vJ1 = f[anchors[J - 1]], vJ2 = f[anchors[J - 2]];
  double dB = vJ - vJ1, dA = vJ1 - vJ2;
  double scale = std::max({std::fabs(vJ), std::fabs(f[anchors[0]]), 1.0});
  if (std::max(std::fabs(dB), std::fabs(dA)) <= std::max(1e-9 * scale, floor))
    return {vJ, true};
  if (std::fabs(dB) <= 0.75 * std::fabs(dA)) {
    double rho = dB / dA;
    return {vJ + dB * rho / (1.0 - rho), true};
  }
  return {std::copysign(std::numeric_limits<double>::infinity(), dB), false};
}

}  // namespace detail

inline DomainReport generator_domain_check(const FellerBoundaryData& D, const WorkGrid& G,
                                           const EigenSolution& E, const DomainCheckInput& in) {
  const bool accA = E.v_a.finite, accB = E.u_b.finite;
  const std::size_t n = G.size();
  if (in.f.size() != n || in.lf.size() != n)
    raise(Errc::InvalidSpec, "pair not sampled on the grid");
  DomainReport rep;
  double sup_f = 0.0;
  for (double fi : in.f) sup_f = std::max(sup_f, std::fabs(fi));
  const double scale = in.tol * (1.0 + sup_f);

  std::vector<double> dsf(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double den = G.s[i + 1] - G.s[i];
    dsf[i] = den > 0.0 ? (in.f[i + 1] - in.f[i]) / den : 0.0;
  }
  dsf[n - 1] = dsf[n - 2];
  BoundaryLimit dsf_a = detail::slope_limit(G, dsf, Endpoint::Lower, scale);
  BoundaryLimit dsf_b = detail::slope_limit(G, dsf, Endpoint::Upper, scale);

  if (accA || (D.a_side_active() && !D.a_irregular)) {
    PhiInput pin;
    pin.f = &in.f;
    pin.f_end = in.f_a;
    if (dsf_a.finite) pin.dsf_end = dsf_a.value;
    pin.lf_end = in.lf_a;
    pin.f_far = in.f_b;
    double resid = phi_a(D, G, pin);
    rep.add("phi-a", std::fabs(resid) <= scale * (1.0 + D.p1 + D.p2 + D.p3), resid);
  } else {
    BoundaryLimit fa = boundary_limit(G, in.f, Endpoint::Lower);
    double resid = fa.finite ? in.f_a - fa.value : std::numeric_limits<double>::infinity();
    rep.add("continuity-a", std::fabs(resid) <= scale, resid);
  }

  if (accB || (D.b_side_active() && !D.b_irregular)) {
    PhiInput pin;
    pin.f = &in.f;
    pin.f_end = in.f_b;
    if (dsf_b.finite) pin.dsf_end = dsf_b.value;
    pin.lf_end = in.lf_b;
    pin.f_far = in.f_a;
    double resid = phi_b(D, G, pin);
    rep.add("phi-b", std::fabs(resid) <= scale * (1.0 + D.q1 + D.q2 + D.q3), resid);
  } else {
    BoundaryLimit fb = boundary_limit(G, in.f, Endpoint::Upper);
    double resid = fb.finite ? in.f_b - fb.value : std::numeric_limits<double>::infinity();
    rep.add("continuity-b", std::fabs(resid) <= scale, resid);
  }

  // entrance endpoints force a vanishing scale slope on domain members
  if (!accA && E.dv_a.finite)
    rep.add("dsf-a", dsf_a.finite && std::fabs(dsf_a.value) <= 1e3 * scale,
            dsf_a.finite ? dsf_a.value : std::numeric_limits<double>::infinity());
  if (!accB && E.du_b.finite)
    rep.add("dsf-b", dsf_b.finite && std::fabs(dsf_b.value) <= 1e3 * scale,
            dsf_b.finite ? dsf_b.value : std::numeric_limits<double>::infinity());
  return rep;
}

/// Admissibility report for boundary data against a diffusion spec.
struct ValidationItem {
  std::string name;
  bool pass = true;
  double value = 0.0;
  std::string note;
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  bool ok = true;

  void add(std::string name, bool pass, double value, std::string note = "") {
    items.push_back({std::move(name), pass, value, std::move(note)});
    ok = ok && pass;
  }
};

namespace detail {

// near-endpoint admissibility weight integral for one jump measure
inline void cond1_item(ValidationReport& rep, const char* name, const DiffusionSpec& spec,
                       const BoundaryMeasure& mu, const BoundaryClass& cls, bool lower) {
  if (mu.interior_empty()) {
    rep.add(name, true, 0.0, "empty interior measure");
    return;
  }
  if (!cls.accessible) {
    rep.add(name, true, 0.0, "endpoint not accessible; finiteness of the measure suffices");
    return;
  }
  const double e = lower ? spec.a : spec.b;
  const double se = spec.s(e);
  auto weight = [&](double x) -> double {
    double sax = std::fabs(spec.s(x) - se);
    if (cls.enterable) return sax;  // regular endpoint: w = s(e, x)
    // exit endpoint: w(x) = int over (e,x) of (m(c) - m(y)) ds(y)
    detail::LadderResult in = detail::boundary_ladder(e, x, spec.s, spec.m);
    return in.value + std::fabs(spec.m(spec.c) - spec.m(x)) * sax;
  };
  double total = 0.0;
  bool finite = true;
  double mid = spec.c;
  for (const BoundaryAtom& at : mu.atoms) {
    bool near = lower ? at.x <= mid : at.x >= mid;
    if (near) total += at.w * weight(at.x);
  }
  if (mu.has_density) {
    double lo = mu.support_lo, hi = mu.support_hi;
    if (lower)
      hi = std::min(hi, mid);
    else
      lo = std::max(lo, mid);
    if (hi > lo) {
      const int cells = 32;
      double xa = lo, wa = weight(xa) * mu.density(xa);
      for (int i = 1; i <= cells; ++i) {
        double xb = lo + (hi - lo) * i / cells;
        double wb = weight(xb) * mu.density(xb);
        total += 0.5 * (wa + wb) * (xb - xa);
        xa = xb;
        wa = wb;
      }
    }
  }
  finite = std::isfinite(total);
  rep.add(name, finite, total, finite ? "" : "weight integral diverged");
}

}  // namespace detail

inline ValidationReport validate_report(const FellerBoundaryData& D, const DiffusionSpec& spec) {
  ValidationReport rep;
  BoundaryClass ca = classify_boundary(spec, Endpoint::Lower);
  BoundaryClass cb = classify_boundary(spec, Endpoint::Upper);

  auto coeffs_ok = [](double c1, double c2, double c3) {
    return std::isfinite(c1) && std::isfinite(c2) && std::isfinite(c3) && c1 >= 0.0 &&
           c2 >= 0.0 && c3 >= 0.0;
  };
  auto measure_ok = [&](const BoundaryMeasure& mu) {
    if (!(mu.endpoint_atom >= 0.0) || !std::isfinite(mu.endpoint_atom)) return false;
    for (const BoundaryAtom& at : mu.atoms)
      if (!(at.w >= 0.0) || !std::isfinite(at.w) || !(at.x > spec.a) || !(at.x < spec.b))
        return false;
    if (mu.has_density) {
      if (!(mu.support_lo >= spec.a) || !(mu.support_hi <= spec.b) ||
          !(mu.support_lo < mu.support_hi))
        return false;
      for (int i = 0; i <= 64; ++i) {
        double x = mu.support_lo + (mu.support_hi - mu.support_lo) * i / 64.0;
        if (mu.density(x) < -1e-12) return false;
      }
    }
    return true;
  };
  rep.add("finite-coeffs", coeffs_ok(D.p1, D.p2, D.p3) && coeffs_ok(D.q1, D.q2, D.q3), 0.0);
  rep.add("measures", measure_ok(D.p4) && measure_ok(D.q4), 0.0,
          "atoms interior, weights and density non-negative, support inside the interval");

  detail::cond1_item(rep, "pcond1", spec, D.p4, ca, true);
  detail::cond1_item(rep, "qcond1", spec, D.q4, cb, false);

  if (ca.accessible)
    rep.add("pcond2", D.p2 + D.p3 > 0.0 || D.p4.declared_infinite, D.p2 + D.p3,
            "needs reflection or stagnancy, or a declared truncated-infinite jump measure");
  else
    rep.add("pcond2", true, 0.0, "endpoint not accessible; condition void");
  if (cb.accessible)
    rep.add("qcond2", D.q2 + D.q3 > 0.0 || D.q4.declared_infinite, D.q2 + D.q3,
            "needs reflection or stagnancy, or a declared truncated-infinite jump measure");
  else
    rep.add("qcond2", true, 0.0, "endpoint not accessible; condition void");

  bool a_regular = ca.accessible && ca.enterable;
  bool b_regular = cb.accessible && cb.enterable;
  rep.add("p2-regular", D.p2 == 0.0 || a_regular, D.p2,
          "reflection admissible only at a regular endpoint");
  rep.add("q2-regular", D.q2 == 0.0 || b_regular, D.q2,
          "reflection admissible only at a regular endpoint");

  // data at an endpoint the interior motion cannot reach runs on stagnancy
  if (!ca.accessible && D.a_side_active() && !D.a_irregular)
    rep.add("p3-inaccessible", D.p3 > 0.0, D.p3,
            "inert-endpoint data needs positive stagnancy unless declared irregular");
  if (!cb.accessible && D.b_side_active() && !D.b_irregular)
    rep.add("q3-inaccessible", D.q3 > 0.0, D.q3,
            "inert-endpoint data needs positive stagnancy unless declared irregular");

  bool a_entrance = !ca.accessible && ca.enterable;
  bool b_entrance = !cb.accessible && cb.enterable;
  if (D.a_irregular)
    rep.add("irregular-a", a_entrance && !D.a_side_active(), 0.0,
            "irregular-for-itself needs an entrance endpoint with no data of its own");
  if (D.b_irregular)
    rep.add("irregular-b", b_entrance && !D.b_side_active(), 0.0,
            "irregular-for-itself needs an entrance endpoint with no data of its own");

  // a far atom must land on a point of the state space the process can
  // restart from: an accessible or enterable endpoint
  if (D.p4.endpoint_atom > 0.0)
    rep.add("atom-target-b", cb.accessible || cb.enterable, D.p4.endpoint_atom,
            "jump atom targets an endpoint the process cannot leave");
  if (D.q4.endpoint_atom > 0.0)
    rep.add("atom-target-a", ca.accessible || ca.enterable, D.q4.endpoint_atom,
            "jump atom targets an endpoint the process cannot leave");

  if (D.case_tag != CaseTag::Auto) {
    CaseTag derived = derive_case(D, ca.accessible, cb.accessible);
    rep.add("case-tag", derived == D.case_tag, 0.0,
            std::string("derived case ") + case_name(derived));
  }
  return rep;
}

inline ValidationReport validate(const FellerBoundaryData& D, const DiffusionSpec& spec) {
  ValidationReport rep = validate_report(D, spec);
  if (!rep.ok) {
    std::string what = "boundary data rejected:";
    for (const ValidationItem& it : rep.items)
      if (!it.pass) what += " " + it.name;
    raise(Errc::InvalidBoundaryData, what);
  }
  return rep;
}

}  // namespace feller

#endif
