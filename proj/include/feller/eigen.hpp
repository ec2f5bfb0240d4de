#ifndef FELLER_EIGEN_HPP
#define FELLER_EIGEN_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "feller/errors.hpp"
#include "feller/grid.hpp"

namespace feller {

/// Initial-value solutions of (r - L)f = 0 at the reference node c:
///   phi(c) = 1, D_s phi(c) = 0;  psi(c) = 0, D_s psi(c) = 1.
struct FundamentalPair {
  double r = 0.0;
  std::vector<double> phi, psi, dphi, dpsi;
};

/// One-sided monotone solution candidate: f = phi - gamma * psi restricted to
/// the sign pattern that makes it positive and monotone, before Wronskian
/// normalization.
struct MonotoneCandidate {
  double gamma = 0.0;
  std::vector<double> f, df;
};

/// Normalized decreasing / increasing solutions on a WorkGrid.
///
/// v = phi - gamma_b psi decreases with v(c) = 1; u increases, scaled so that
/// the Wronskian v D_s u - u D_s v is identically 1. Endpoint values and
/// scale derivatives are monotone-extrapolated limits; a non-finite flag
/// means the limit diverges. D_s u(a) = 1/v(a) and D_s v(b) = -1/u(b)
/// (with 1/infinity = 0) hold exactly and pin those two entries.
struct EigenSolution {
  double r = 0.0;
  std::vector<double> phi, psi, dphi, dpsi;
  double gamma_a = 0.0, gamma_b = 0.0;
  std::vector<double> u, v, du, dv;
  BoundaryLimit u_a, u_b, v_a, v_b;      // endpoint values
  BoundaryLimit du_a, du_b, dv_a, dv_b;  // endpoint scale derivatives
  double wronskian_residual = 0.0;       // max |v du - u dv - 1| over the grid
};

namespace detail {

// one Picard sweep: out = base + r * int_c^x ( int_c^y f dm ) ds
inline void picard_step(const WorkGrid& G, double r, const std::vector<double>& base,
                        const std::vector<double>& f, std::vector<double>& inner,
                        std::vector<double>& out) {
  inner = cum_from(f, G.m, G.ic);
  out = cum_from(inner, G.s, G.ic);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = base[i] + r * out[i];
}

inline void picard_solve(const WorkGrid& G, double r, const std::vector<double>& base,
                         std::vector<double>& f, std::vector<double>& df, double tol_fix,
                         int max_iter) {
  const std::size_t n = G.size();
  std::vector<double> inner(n), next(n);
  f = base;
  int it = 0;
  for (; it < max_iter; ++it) {
    picard_step(G, r, base, f, inner, next);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double denom = std::max({std::fabs(next[i]), std::fabs(base[i]), 1.0});
      worst = std::max(worst, std::fabs(next[i] - f[i]) / denom);
      if (!std::isfinite(next[i]) || std::fabs(next[i]) > 1e200)
        raise(Errc::NoConvergence,
              "eigenfunction overflow; rebuild the grid with r_ref >= the solve rate");
    }
    f.swap(next);
    if (worst <= tol_fix && it >= 1) break;
  }
  if (it == max_iter)
    raise(Errc::NoConvergence, "series for the fundamental pair did not settle");
  // exact relation for the converged fixed point
  df = cum_from(f, G.m, G.ic);
  for (std::size_t i = 0; i < df.size(); ++i) df[i] *= r;
}

// Endpoint limit of phi/psi along the anchors; this is the critical slope
// separating sign change from monotonicity failure in phi - gamma psi, so
// locating it is equivalent to squeezing that bracket to zero width.
// Geometric increment decay (regular, exit, and natural endpoints) gets the
// geometric tail. Slow decay happens only when s diverges while
// phi - gamma psi tends to a nonzero limit (entrance); there the ratio is
// linear in t = 1/psi up to geometrically small terms, so extrapolate in t
// to t = 0. A tail that neither decays geometrically nor rides a divergent
// s cannot certify a limit: the grid truncation was too aggressive.
inline double gamma_limit(const WorkGrid& G, const std::vector<double>& ratio,
                          const std::vector<double>& psi, Endpoint ep) {
  const std::vector<std::size_t>& A = ep == Endpoint::Lower ? G.anchors_a : G.anchors_b;
  const std::size_t J = A.size() - 1;
  double rJ = ratio[A[J]], rJ1 = ratio[A[J - 1]], rJ2 = ratio[A[J - 2]];
  double dB = rJ - rJ1, dA = rJ1 - rJ2;
  if (std::fabs(dB) <= 1e-12 * std::max(std::fabs(rJ), 1.0)) return rJ;
  if (std::fabs(dB) <= 0.75 * std::fabs(dA)) {
    double rho = dB / dA;
    return rJ + dB * rho / (1.0 - rho);
  }
  double dsB = std::fabs(G.s[A[J]] - G.s[A[J - 1]]);
  double dsA = std::fabs(G.s[A[J - 1]] - G.s[A[J - 2]]);
  if (dsB <= 0.9 * dsA)
    raise(Errc::DegenerateBracket, "phi/psi ratio tail did not settle near an endpoint");
  double tJ = 1.0 / psi[A[J]], tJ1 = 1.0 / psi[A[J - 1]];
  if (tJ1 == tJ) return rJ;
  return rJ + (rJ - rJ1) * tJ / (tJ1 - tJ);
}

inline std::vector<double> ratio_phi_psi(const FundamentalPair& P) {
  std::vector<double> ratio(P.phi.size(), 0.0);
  for (std::size_t i = 0; i < ratio.size(); ++i)
    if (P.psi[i] != 0.0) ratio[i] = P.phi[i] / P.psi[i];
  return ratio;
}

}  // namespace detail

inline FundamentalPair solve_phi_psi(const WorkGrid& G, double r, double tol_fix = 1e-12,
                                     int max_iter = 200) {
  if (!(r > 0.0) || !std::isfinite(r)) raise(Errc::InvalidSpec, "rate must be positive");
  const std::size_t n = G.size();
  FundamentalPair P;
  P.r = r;
  std::vector<double> ones(n, 1.0);
  detail::picard_solve(G, r, ones, P.phi, P.dphi, tol_fix, max_iter);
  detail::picard_solve(G, r, G.s, P.psi, P.dpsi, tol_fix, max_iter);
  for (std::size_t i = 0; i < n; ++i) P.dpsi[i] += 1.0;
  return P;
}

/// Decreasing candidate v = phi - gamma_b psi with v(c) = 1. gamma_b is the
/// upper-endpoint limit of phi/psi: the unique slope at which the combination
/// stays nonnegative and nonincreasing all the way to b.
inline MonotoneCandidate build_v(const WorkGrid& G, const FundamentalPair& P) {
  MonotoneCandidate C;
  std::vector<double> ratio = detail::ratio_phi_psi(P);
  C.gamma = detail::gamma_limit(G, ratio, P.psi, Endpoint::Upper);
  if (!std::isfinite(C.gamma) || !(C.gamma > 0.0))
    raise(Errc::DegenerateBracket, "upper critical slope is not positive");
  const std::size_t n = G.size();
  C.f.resize(n);
  C.df.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    C.f[i] = P.phi[i] - C.gamma * P.psi[i];
    C.df[i] = P.dphi[i] - C.gamma * P.dpsi[i];
  }
  return C;
}

/// Increasing candidate u_raw = phi - gamma_a psi with u_raw(c) = 1 (not yet
/// Wronskian-normalized); gamma_a mirrors build_v at the lower endpoint.
inline MonotoneCandidate build_u(const WorkGrid& G, const FundamentalPair& P) {
  MonotoneCandidate C;
  std::vector<double> ratio = detail::ratio_phi_psi(P);
  C.gamma = detail::gamma_limit(G, ratio, P.psi, Endpoint::Lower);
  if (!std::isfinite(C.gamma) || !(C.gamma < 0.0))
    raise(Errc::DegenerateBracket, "lower critical slope is not negative");
  const std::size_t n = G.size();
  C.f.resize(n);
  C.df.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    C.f[i] = P.phi[i] - C.gamma * P.psi[i];
    C.df[i] = P.dphi[i] - C.gamma * P.dpsi[i];
  }
  return C;
}

/// Scales the increasing candidate so v D_s u - u D_s v = 1, then attaches
/// endpoint limits. The raw Wronskian equals gamma_b - gamma_a.
inline EigenSolution normalize_wronskian(const WorkGrid& G, const FundamentalPair& P,
                                         const MonotoneCandidate& ucand,
                                         const MonotoneCandidate& vcand) {
  const std::size_t n = G.size();
  EigenSolution E;
  E.r = P.r;
  E.phi = P.phi;
  E.psi = P.psi;
  E.dphi = P.dphi;
  E.dpsi = P.dpsi;
  E.gamma_a = ucand.gamma;
  E.gamma_b = vcand.gamma;
  double W = vcand.f[G.ic] * ucand.df[G.ic] - ucand.f[G.ic] * vcand.df[G.ic];
  if (!(W > 1e-14) || !std::isfinite(W))
    raise(Errc::ZeroWronskian, "candidate Wronskian below 1e-14");
  E.v = vcand.f;
  E.dv = vcand.df;
  E.u.resize(n);
  E.du.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    E.u[i] = ucand.f[i] / W;
    E.du[i] = ucand.df[i] / W;
  }
  double resid = 0.0;
  for (std::size_t i = 0; i < n; i += 7)
    resid = std::max(resid, std::fabs(E.v[i] * E.du[i] - E.u[i] * E.dv[i] - 1.0));
  E.wronskian_residual = resid;

  E.u_a = boundary_limit(G, E.u, Endpoint::Lower);
  E.u_b = boundary_limit(G, E.u, Endpoint::Upper);
  E.v_a = boundary_limit(G, E.v, Endpoint::Lower);
  E.v_b = boundary_limit(G, E.v, Endpoint::Upper);
  E.du_a = boundary_limit(G, E.du, Endpoint::Lower);
  E.du_b = boundary_limit(G, E.du, Endpoint::Upper);
  E.dv_a = boundary_limit(G, E.dv, Endpoint::Lower);
  E.dv_b = boundary_limit(G, E.dv, Endpoint::Upper);
  // u decays toward a and v toward b while phi, gamma psi both blow up, so
  // those differences can sink below the cancellation floor; a tail that sits
  // at the floor is a limit of 0, whatever the raw extrapolation said
  {
    std::size_t ja = G.anchors_a.back(), jb = G.anchors_b.back();
    double floor_a = 1e-13 * (std::fabs(E.phi[ja]) + std::fabs(E.gamma_a * E.psi[ja]));
    double floor_b = 1e-13 * (std::fabs(E.phi[jb]) + std::fabs(E.gamma_b * E.psi[jb]));
    if (std::fabs(E.u[ja] * W) <= std::max(100.0 * floor_a, 1e-12)) E.u_a = {0.0, true};
    if (std::fabs(E.v[jb]) <= std::max(100.0 * floor_b, 1e-12)) E.v_b = {0.0, true};
  }
  // u, v are monotone with known signs; the extrapolated endpoint values may
  // round slightly past the admissible range, so clamp them there
  if (E.u_a.finite && E.u_a.value < 0.0) E.u_a.value = 0.0;
  if (E.v_b.finite && E.v_b.value < 0.0) E.v_b.value = 0.0;
  // reciprocity pins the derivative of each solution at its decay end:
  // D_s u(a) = 1/v(a), D_s v(b) = -1/u(b), with 1/infinity = 0; these are
  // exact and sharper than the raw extrapolations (the other two derivative
  // limits stay extrapolated, they are genuine enterability indicators)
  E.du_a = E.v_a.finite ? BoundaryLimit{1.0 / E.v_a.value, true} : BoundaryLimit{0.0, true};
  E.dv_b = E.u_b.finite ? BoundaryLimit{-1.0 / E.u_b.value, true} : BoundaryLimit{0.0, true};
  // at a natural endpoint the decaying solution tends to 0, but too slowly
  // in x for the extrapolator; both indicators diverging identifies it
  if (!E.v_a.finite && !E.dv_a.finite && !E.u_a.finite) E.u_a = {0.0, true};
  if (!E.u_b.finite && !E.du_b.finite && !E.v_b.finite) E.v_b = {0.0, true};
  return E;
}

inline EigenSolution compute_eigen(const WorkGrid& G, double r) {
  FundamentalPair P = solve_phi_psi(G, r, 1e-15, 400);
  MonotoneCandidate u = build_u(G, P);
  MonotoneCandidate v = build_v(G, P);
  return normalize_wronskian(G, P, u, v);
}

}  // namespace feller

#endif
