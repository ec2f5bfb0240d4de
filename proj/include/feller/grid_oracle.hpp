#ifndef FELLER_GRID_ORACLE_HPP
#define FELLER_GRID_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "feller/boundary_data.hpp"
#include "feller/diffusion.hpp"
#include "feller/errors.hpp"

namespace feller {

/// Endpoint row flavor: a discretized endpoint functional when the endpoint
/// carries its own state, or identification with the interior limit.
enum class EndpointRowKind { Phi, Continuity };

/// Extra equation replacing the first interior generator row next to an
/// endpoint the process cannot reach.
enum class ClosureKind { None, EntranceFlux, NaturalLimit };

/// One (possibly dense) boundary row of the discrete system, coef . f = rhs.
struct OracleRow {
  std::vector<double> coef;
  double rhs = 0.0;
};

/// Finite-difference chain for (r - L) f = g with generalized boundary rows.
/// Nodes always include both boundary points; at an unreachable endpoint the
/// boundary node is a detached state and the adjacent generator row is
/// replaced by the side's closure equation, so the stencil never forms a
/// scale increment against that endpoint.
struct GridChain {
  DiffusionSpec spec;
  FellerBoundaryData data;
  std::vector<double> x;
  // discrete generator (L f)_i = sub_i f_{i-1} + dia_i f_i + sup_i f_{i+1};
  // meaningful on rows gen_lo..gen_hi inclusive, zero elsewhere
  std::vector<double> gen_sub, gen_dia, gen_sup;
  std::size_t gen_lo = 0, gen_hi = 0;
  bool acc_a = true, acc_b = true;
  EndpointRowKind row_a = EndpointRowKind::Phi, row_b = EndpointRowKind::Phi;
  ClosureKind close_a = ClosureKind::None, close_b = ClosureKind::None;
  double s_edge_a = 0.0, s_edge_b = 0.0;  // scale of the boundary cell, accessible sides
  double kappa_a = 0.0, kappa_b = 0.0;    // holding weight of the boundary cell
  double kflux_a = 0.0, kflux_b = 0.0;    // entrance closure weight
  std::vector<double> w4p, w4q;           // interior jump-measure weights per node
  double p4_end = 0.0, q4_end = 0.0;      // jump atoms sitting on the far endpoints

  std::size_t size() const { return x.size(); }
};

namespace detail {

// hat-function weights of one interior measure on the node set; per-cell
// trapezoid split, so the lumped mass matches the trapezoid mass exactly
inline std::vector<double> lump_measure(const std::vector<double>& x, const BoundaryMeasure& mu,
                                        double a, double b) {
  std::vector<double> w(x.size(), 0.0);
  auto cell_of = [&](double q) {
    auto it = std::upper_bound(x.begin(), x.end(), q);
    std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    if (i + 2 > x.size()) i = x.size() - 2;
    return i;
  };
  for (const BoundaryAtom& at : mu.atoms) {
    if (at.w == 0.0) continue;
    if (!(at.x > a && at.x < b))
      raise(Errc::OutOfDomain, "jump atom at x = " + std::to_string(at.x) +
                                   " is outside the open interval");
    std::size_t i = cell_of(at.x);
    double t = (at.x - x[i]) / (x[i + 1] - x[i]);
    t = std::clamp(t, 0.0, 1.0);
    w[i] += at.w * (1.0 - t);
    w[i + 1] += at.w * t;
  }
  if (mu.has_density) {
    double lo = std::max(mu.support_lo, x.front());
    double hi = std::min(mu.support_hi, x.back());
    for (std::size_t i = cell_of(lo); hi > lo && i + 1 < x.size(); ++i) {
      double xl = std::max(lo, x[i]), xr = std::min(hi, x[i + 1]);
      if (!(xr > xl)) {
        if (x[i] >= hi) break;
        continue;
      }
      double rl = mu.density(xl), rr = mu.density(xr);
      if (!std::isfinite(rl) || !std::isfinite(rr))
        raise(Errc::DivergentQuadrature, "jump density not finite inside its support");
      double dx = xr - xl, h = x[i + 1] - x[i];
      double tl = (x[i + 1] - xl) / h, tr = (x[i + 1] - xr) / h;
      w[i] += 0.5 * (rl * tl + rr * tr) * dx;
      w[i + 1] += 0.5 * (rl * (1.0 - tl) + rr * (1.0 - tr)) * dx;
      if (x[i + 1] >= hi) break;
    }
  }
  return w;
}

// trapezoid of (m - m(x_lo)) ds over the deepest tail band; the speed mass
// hidden below the band is negligible at the anchored depth
inline double entrance_flux_weight(const DiffusionSpec& spec, double x_lo, double x_hi,
                                   bool lower) {
  const int cells = 32;
  double m0 = lower ? spec.m(x_lo) : spec.m(x_hi);
  double acc = 0.0;
  double ya = x_lo, sa = spec.s(ya), wa = std::fabs(spec.m(ya) - m0);
  for (int i = 1; i <= cells; ++i) {
    double yb = x_lo + (x_hi - x_lo) * i / cells;
    double sb = spec.s(yb), wb = std::fabs(spec.m(yb) - m0);
    acc += 0.5 * (wa + wb) * (sb - sa);
    ya = yb;
    sa = sb;
    wa = wb;
  }
  return acc;
}

}  // namespace detail

/// Builds the chain: node placement, discrete generator rows, boundary-row
/// plumbing. Node budget n is met exactly. Unreachable endpoints get a
/// geometric anchor tail whose depth grows with n, so the closure error
/// vanishes under refinement; reachable endpoints are genuine nodes.
inline GridChain discretize(const DiffusionSpec& spec, const FellerBoundaryData& data,
                            std::size_t n) {
  if (n < 8) raise(Errc::GridTooCoarse, "need at least 8 nodes");
  GridChain C;
  C.spec = spec;
  C.data = data;
  BoundaryClass ca = classify_boundary(spec, Endpoint::Lower);
  BoundaryClass cb = classify_boundary(spec, Endpoint::Upper);
  C.acc_a = ca.accessible;
  C.acc_b = cb.accessible;
  C.close_a = ca.accessible ? ClosureKind::None
              : ca.enterable ? ClosureKind::EntranceFlux
                             : ClosureKind::NaturalLimit;
  C.close_b = cb.accessible ? ClosureKind::None
              : cb.enterable ? ClosureKind::EntranceFlux
                             : ClosureKind::NaturalLimit;
  C.row_a = C.acc_a || (data.a_side_active() && !data.a_irregular) ? EndpointRowKind::Phi
                                                                   : EndpointRowKind::Continuity;
  C.row_b = C.acc_b || (data.b_side_active() && !data.b_irregular) ? EndpointRowKind::Phi
                                                                   : EndpointRowKind::Continuity;

  // node placement: anchor tails toward unreachable endpoints, uniform core
  const double L = spec.b - spec.a;
  auto tail_offsets = [&](double d, bool lower) {
    std::vector<double> offs;
    std::size_t budget = std::max<std::size_t>(3, n / 8);
    std::size_t bands = std::min<std::size_t>(44, budget);
    for (std::size_t j = 0; j <= bands; ++j) {
      double off = std::ldexp(d, -static_cast<int>(j));
      double xx = lower ? spec.a + off : spec.b - off;
      if (xx == (lower ? spec.a : spec.b)) break;
      if (!std::isfinite(spec.s(xx)) || !std::isfinite(spec.m(xx))) {
        if (j <= 2) raise(Errc::InvalidSpec, "scale/speed blow up inside the interval");
        break;
      }
      offs.push_back(off);
    }
    return offs;
  };
  const double da = std::min(0.05 * L, 0.45 * (spec.c - spec.a));
  const double db = std::min(0.05 * L, 0.45 * (spec.b - spec.c));
  std::vector<double> offs_a = C.acc_a ? std::vector<double>{} : tail_offsets(da, true);
  std::vector<double> offs_b = C.acc_b ? std::vector<double>{} : tail_offsets(db, false);

  auto tail_nodes = [&](const std::vector<double>& offs, bool lower) {
    // ascending x; deepest anchor first on the lower side; excludes the
    // outermost anchor, which doubles as the core edge
    std::vector<double> xs;
    if (offs.empty()) return xs;
    std::size_t bands = offs.size() - 1;
    std::size_t budget = std::max<std::size_t>(3, n / 8);
    std::size_t extra = budget > bands ? budget - bands : 0;
    std::vector<std::size_t> cells(bands, 1);
    for (std::size_t e = 0; e < extra; ++e) cells[e % std::max<std::size_t>(bands, 1)] += 1;
    auto at = [&](double off) { return lower ? spec.a + off : spec.b - off; };
    if (lower) {
      xs.push_back(at(offs.back()));
      for (std::size_t j = offs.size() - 1; j > 0; --j) {
        double lo = at(offs[j]), hi = at(offs[j - 1]);
        std::size_t k = cells[j - 1];
        for (std::size_t q = 1; q < k; ++q) xs.push_back(lo + (hi - lo) * q / k);
        if (j > 1) xs.push_back(hi);
      }
    } else {
      for (std::size_t j = 1; j < offs.size(); ++j) {
        double lo = at(offs[j - 1]), hi = at(offs[j]);
        std::size_t k = cells[j - 1];
        if (j > 1) xs.push_back(lo);
        for (std::size_t q = 1; q < k; ++q) xs.push_back(lo + (hi - lo) * q / k);
      }
      xs.push_back(at(offs.back()));
    }
    return xs;
  };
  std::vector<double> left = tail_nodes(offs_a, true);
  std::vector<double> right = tail_nodes(offs_b, false);

  double edge_a = C.acc_a ? spec.a : spec.a + offs_a.front();
  double edge_b = C.acc_b ? spec.b : spec.b - offs_b.front();
  // budget: detached endpoint nodes + tails; the core spans the edges and,
  // on a reachable side, its edge node is the endpoint itself
  std::size_t fixed = left.size() + right.size() + (C.acc_a ? 0 : 1) + (C.acc_b ? 0 : 1);
  if (n < fixed + 3) raise(Errc::GridTooCoarse, "node budget too small for the boundary tails");
  std::size_t core_count = n - fixed;
  std::size_t core_cells = core_count - 1;
  C.x.reserve(n);
  if (!C.acc_a) C.x.push_back(spec.a);
  for (double q : left) C.x.push_back(q);
  for (std::size_t i = 0; i <= core_cells; ++i)
    C.x.push_back(edge_a + (edge_b - edge_a) * static_cast<double>(i) / core_cells);
  for (double q : right) C.x.push_back(q);
  if (!C.acc_b) C.x.push_back(spec.b);
  for (std::size_t i = 0; i + 1 < C.x.size(); ++i)
    if (!(C.x[i + 1] > C.x[i])) raise(Errc::GridTooCoarse, "node set collapsed; reduce n or tails");

  const std::size_t N = C.x.size();
  // discrete generator rows: divided differences in s, then in m between
  // cell midpoints; zero row sums and non-negative off-diagonals hold by
  // construction
  C.gen_sub.assign(N, 0.0);
  C.gen_dia.assign(N, 0.0);
  C.gen_sup.assign(N, 0.0);
  C.gen_lo = C.acc_a ? 1 : 2;
  C.gen_hi = C.acc_b ? N - 2 : N - 3;
  std::vector<double> sv(N), mmid(N - 1);
  for (std::size_t i = 0; i < N; ++i) sv[i] = spec.s(C.x[i]);
  for (std::size_t i = 0; i + 1 < N; ++i) mmid[i] = spec.m(0.5 * (C.x[i] + C.x[i + 1]));
  for (std::size_t i = C.gen_lo; i <= C.gen_hi; ++i) {
    double dsm = sv[i] - sv[i - 1], dsp = sv[i + 1] - sv[i];
    double dm = mmid[i] - mmid[i - 1];
    if (!(dsm > 0.0) || !(dsp > 0.0) || !(dm > 0.0))
      raise(Errc::InvalidSpec, "scale/speed increments vanish on the node set");
    C.gen_sub[i] = 1.0 / (dsm * dm);
    C.gen_sup[i] = 1.0 / (dsp * dm);
    C.gen_dia[i] = -(C.gen_sub[i] + C.gen_sup[i]);
  }

  if (C.acc_a) {
    C.s_edge_a = sv[1] - sv[0];
    if (data.p2 > 0.0) {
      detail::LadderResult k = detail::boundary_ladder(spec.a, C.x[1], spec.m, spec.s, 24);
      if (k.conv == detail::Conv::Infinite)
        raise(Errc::DivergentQuadrature, "holding weight of the boundary cell diverges at a");
      C.kappa_a = k.value;
    }
  } else if (C.close_a == ClosureKind::EntranceFlux) {
    C.kflux_a = detail::entrance_flux_weight(spec, C.x[1], C.x[2], true);
  }
  if (C.acc_b) {
    C.s_edge_b = sv[N - 1] - sv[N - 2];
    if (data.q2 > 0.0) {
      detail::LadderResult k = detail::boundary_ladder(spec.b, C.x[N - 2], spec.m, spec.s, 24);
      if (k.conv == detail::Conv::Infinite)
        raise(Errc::DivergentQuadrature, "holding weight of the boundary cell diverges at b");
      C.kappa_b = k.value;
    }
  } else if (C.close_b == ClosureKind::EntranceFlux) {
    C.kflux_b = detail::entrance_flux_weight(spec, C.x[N - 3], C.x[N - 2], false);
  }

  C.w4p = detail::lump_measure(C.x, data.p4, spec.a, spec.b);
  C.w4q = detail::lump_measure(C.x, data.q4, spec.a, spec.b);
  C.p4_end = data.p4.endpoint_atom;
  C.q4_end = data.q4.endpoint_atom;
  return C;
}

/// Discretized endpoint functionals of the chain as explicit linear rows in
/// the node values, with the endpoint generator value rewritten through
/// L f = r f - g. The reflection term uses the holding-corrected one-sided
/// difference, which keeps the row consistent to the interior order.
inline std::pair<OracleRow, OracleRow> boundary_rows(const GridChain& C,
                                                     const std::vector<double>& g, double r) {
  const std::size_t N = C.size();
  const FellerBoundaryData& D = C.data;
  OracleRow A, B;
  A.coef.assign(N, 0.0);
  B.coef.assign(N, 0.0);

  if (C.row_a == EndpointRowKind::Phi) {
    A.coef[0] += D.p1 + D.p3 * r;
    A.rhs += D.p3 * g[0];
    if (D.p2 > 0.0) {
      if (!C.acc_a) raise(Errc::InvalidBoundaryData, "reflection at an unreachable endpoint");
      double c = D.p2 / C.s_edge_a;
      A.coef[1] -= c;
      A.coef[0] += c + c * C.kappa_a * r;
      A.rhs += c * C.kappa_a * g[0];
    }
    // mass lumped onto the boundary node itself pairs against f - f(a) = 0
    for (std::size_t j = 1; j < N; ++j)
      if (C.w4p[j] != 0.0) {
        A.coef[j] -= C.w4p[j];
        A.coef[0] += C.w4p[j];
      }
    if (C.p4_end > 0.0) {
      A.coef[N - 1] -= C.p4_end;
      A.coef[0] += C.p4_end;
    }
  } else {
    A.coef[0] = 1.0;
    A.coef[1] = -1.0;
  }

  if (C.row_b == EndpointRowKind::Phi) {
    B.coef[N - 1] += D.q1 + D.q3 * r;
    B.rhs += D.q3 * g[N - 1];
    if (D.q2 > 0.0) {
      if (!C.acc_b) raise(Errc::InvalidBoundaryData, "reflection at an unreachable endpoint");
      double c = D.q2 / C.s_edge_b;
      B.coef[N - 2] -= c;
      B.coef[N - 1] += c + c * C.kappa_b * r;
      B.rhs += c * C.kappa_b * g[N - 1];
    }
    for (std::size_t j = 0; j + 1 < N; ++j)
      if (C.w4q[j] != 0.0) {
        B.coef[j] -= C.w4q[j];
        B.coef[N - 1] += C.w4q[j];
      }
    if (C.q4_end > 0.0) {
      B.coef[0] -= C.q4_end;
      B.coef[N - 1] += C.q4_end;
    }
  } else {
    B.coef[N - 1] = 1.0;
    B.coef[N - 2] = -1.0;
  }
  return {A, B};
}

/// Solves (r - L) f = g on the chain with the two boundary rows. Interior
/// rows are eliminated once by the tridiagonal algorithm against three
/// right-hand sides; the boundary rows close a 2x2 system on the endpoint
/// values, dense couplings included.
inline std::vector<double> solve_resolvent(const GridChain& C, const std::vector<double>& g,
                                           double r) {
  if (!(r > 0.0)) raise(Errc::InvalidSpec, "resolvent parameter must be positive");
  const std::size_t N = C.size();
  if (g.size() != N) raise(Errc::InvalidSpec, "right-hand side length does not match the nodes");
  for (double gi : g)
    if (!std::isfinite(gi)) raise(Errc::UnboundedIntegrand, "right-hand side is not finite");

  // interior block over f_1..f_{N-2}: lo[i] f_{i-1} + di[i] f_i + up[i] f_{i+1} = b
  std::vector<double> lo(N, 0.0), di(N, 0.0), up(N, 0.0);
  std::vector<double> b0(N, 0.0), ea(N, 0.0), eb(N, 0.0);  // rhs, f(a)-, f(b)-couplings
  for (std::size_t i = 1; i + 1 < N; ++i) {
    bool generator = i >= C.gen_lo && i <= C.gen_hi;
    if (generator) {
      lo[i] = -C.gen_sub[i];
      di[i] = r - C.gen_dia[i];
      up[i] = -C.gen_sup[i];
      b0[i] = g[i];
      if (i == 1) {
        ea[i] = C.gen_sub[i];
        lo[i] = 0.0;
      }
      if (i + 2 == N) {
        eb[i] = C.gen_sup[i];
        up[i] = 0.0;
      }
    } else if (i == 1 || i + 2 == N) {
      // closure next to an unreachable endpoint
      ClosureKind ck = i == 1 ? C.close_a : C.close_b;
      double kf = i == 1 ? C.kflux_a : C.kflux_b;
      if (ck == ClosureKind::EntranceFlux) {
        di[i] = 1.0 + r * kf;
        (i == 1 ? up[i] : lo[i]) = -1.0;
        b0[i] = kf * g[i];
      } else {
        di[i] = 1.0;
        b0[i] = g[i] / r;
      }
    } else {
      raise(Errc::SingularSystem, "interior row without an equation");
    }
  }

  // tridiagonal elimination, three right-hand sides; rows are diagonally
  // dominant so no pivoting is needed
  std::vector<double> w0(N, 0.0), w1(N, 0.0), w2(N, 0.0), cp(N, 0.0);
  {
    double d = di[1];
    if (!(std::fabs(d) > 0.0)) raise(Errc::SingularSystem, "zero pivot in the interior block");
    cp[1] = up[1] / d;
    w0[1] = b0[1] / d;
    w1[1] = ea[1] / d;
    w2[1] = eb[1] / d;
    for (std::size_t i = 2; i + 1 < N; ++i) {
      double den = di[i] - lo[i] * cp[i - 1];
      if (!(std::fabs(den) > 0.0)) raise(Errc::SingularSystem, "zero pivot in the interior block");
      cp[i] = up[i] / den;
      w0[i] = (b0[i] - lo[i] * w0[i - 1]) / den;
      w1[i] = (ea[i] - lo[i] * w1[i - 1]) / den;
      w2[i] = (eb[i] - lo[i] * w2[i - 1]) / den;
    }
    for (std::size_t i = N - 3; i >= 1; --i) {
      w0[i] -= cp[i] * w0[i + 1];
      w1[i] -= cp[i] * w1[i + 1];
      w2[i] -= cp[i] * w2[i + 1];
      if (i == 1) break;
    }
  }

  auto rows = boundary_rows(C, g, r);
  auto reduce = [&](const OracleRow& R, double& caa, double& cbb, double& rhs) {
    caa = R.coef[0];
    cbb = R.coef[N - 1];
    rhs = R.rhs;
    for (std::size_t i = 1; i + 1 < N; ++i) {
      if (R.coef[i] == 0.0) continue;
      caa += R.coef[i] * w1[i];
      cbb += R.coef[i] * w2[i];
      rhs -= R.coef[i] * w0[i];
    }
  };
  double a00, a01, r0, a10, a11, r1;
  reduce(rows.first, a00, a01, r0);
  reduce(rows.second, a10, a11, r1);
  double n0 = std::max(std::fabs(a00), std::fabs(a01));
  double n1 = std::max(std::fabs(a10), std::fabs(a11));
  if (!(n0 > 0.0) || !(n1 > 0.0))
    raise(Errc::SingularSystem, "an endpoint row vanished; no condition closes the system");
  double det = (a00 / n0) * (a11 / n1) - (a01 / n0) * (a10 / n1);
  if (!(std::fabs(det) > 1e-12))
    raise(Errc::SingularSystem, "endpoint system is singular");
  double fa = ((r0 / n0) * (a11 / n1) - (a01 / n0) * (r1 / n1)) / det;
  double fb = ((a00 / n0) * (r1 / n1) - (r0 / n0) * (a10 / n1)) / det;

  std::vector<double> f(N);
  f[0] = fa;
  f[N - 1] = fb;
  for (std::size_t i = 1; i + 1 < N; ++i) f[i] = w0[i] + fa * w1[i] + fb * w2[i];
  return f;
}

}  // namespace feller

#endif
