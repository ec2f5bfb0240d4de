#ifndef FELLER_DIFFUSION_HPP
#define FELLER_DIFFUSION_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "feller/errors.hpp"
#include "feller/scalar_fn.hpp"

namespace feller {

enum class Endpoint { Lower, Upper };

struct Sde {
  ScalarFn mu, sigma;
};

/// One-dimensional diffusion on the open interval (a, b) in natural scale /
/// speed-measure form. `s` and `m` must be strictly increasing on (a, b);
/// only increments of either ever enter the numerics, so the normalization
/// s(c) = m(c) = 0 is applied wherever values are tabulated.
struct DiffusionSpec {
  double a = 0.0, b = 1.0, c = 0.5;
  ScalarFn s, m;
  std::optional<Sde> sde;

  static DiffusionSpec make(double a, double b, double c, ScalarFn s, ScalarFn m) {
    if (!(a < c && c < b)) raise(Errc::InvalidSpec, "need a < c < b");
    if (!s.valid() || !m.valid()) raise(Errc::InvalidSpec, "scale/speed handle missing");
    DiffusionSpec d;
    d.a = a;
    d.b = b;
    d.c = c;
    d.s = std::move(s);
    d.m = std::move(m);
    // spot check monotonicity away from the endpoints
    std::vector<double> pts;
    for (int i = 1; i < 32; ++i) pts.push_back(a + (b - a) * i / 32.0);
    d.s.check_strictly_increasing(pts, "scale");
    d.m.check_strictly_increasing(pts, "speed");
    return d;
  }
};

enum class BoundaryKind { Regular, Exit, Entrance, Natural };

inline const char* kind_name(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::Regular: return "Regular";
    case BoundaryKind::Exit: return "Exit";
    case BoundaryKind::Entrance: return "Entrance";
    case BoundaryKind::Natural: return "Natural";
  }
  return "?";
}

/// Extended real used for boundary quantities; `finite == false` means the
/// dyadic-cutoff extrapolation diagnosed divergence (value keeps the sign).
struct ExtReal {
  double value = 0.0;
  bool finite = true;
};

struct BoundaryClass {
  BoundaryKind kind = BoundaryKind::Regular;
  bool accessible = true;
  bool enterable = true;
  double gamma = 1.0;  // 1 when accessible, else 0
};

struct FellerIntegrals {
  ExtReal access, enter;
};

namespace detail {

enum class Conv { Finite, Infinite, Indeterminate };

struct LadderResult {
  Conv conv = Conv::Finite;
  double value = 0.0;
};

// Iterated boundary integral reduced to a single weighted integral
//   J = int over (e, c) of |nu(c) - nu(x)| d|mu|(x)
// evaluated on a geometric ladder of cutoffs toward the endpoint e.
// Monotone increasing partial sums; the last dyadic increment decides
// convergence: below `theta` of the running value -> finite (plus a
// geometric tail estimate), non-decaying -> infinite, else indeterminate.
template <class Mu, class Nu>
LadderResult boundary_ladder(double e, double c, Mu mu, Nu nu, int levels = 20,
                             double theta = 1e-3) {
  const bool lower = e < c;
  const double span = std::fabs(c - e);
  const double eps0 = 0.1 * span;
  if (!(eps0 > 0.0)) raise(Errc::InvalidSpec, "empty integration range");
  const double nuc = nu(c);

  auto segment = [&](double x0, double x1, int cells) {
    // trapezoid of w(x) = |nuc - nu(x)| against d mu, orientation-free
    double sum = 0.0;
    double xa = x0;
    double ma = mu(xa), wa = std::fabs(nuc - nu(xa));
    for (int i = 1; i <= cells; ++i) {
      double xb = x0 + (x1 - x0) * i / cells;
      double mb = mu(xb), wb = std::fabs(nuc - nu(xb));
      if (!std::isfinite(mb) || !std::isfinite(wb))
        raise(Errc::DivergentQuadrature, "non-finite integrand near x = " + std::to_string(xb));
      sum += 0.5 * (wa + wb) * std::fabs(mb - ma);
      ma = mb;
      wa = wb;
      xa = xb;
    }
    return sum;
  };

  double sgn = lower ? 1.0 : -1.0;
  double head_lo = e + sgn * eps0;
  double J = segment(head_lo, c, 256);
  double inc_prev = -1.0, inc_last = -1.0;
  double eps = eps0;
  for (int k = 1; k <= levels; ++k) {
    double eps_next = 0.5 * eps;
    double x_out = e + sgn * eps;       // farther from endpoint
    double x_in = e + sgn * eps_next;   // closer to endpoint
    double inc = segment(x_in, x_out, 16);
    J += inc;
    inc_prev = inc_last;
    inc_last = inc;
    eps = eps_next;
  }
  if (!(J > 0.0)) return {Conv::Finite, J};
  if (inc_last <= theta * J) {
    double tail = 0.0;
    if (inc_prev > 0.0) {
      double rho = inc_last / inc_prev;
      if (rho > 0.0 && rho < 0.95) tail = inc_last * rho / (1.0 - rho);
    }
    return {Conv::Finite, J + tail};
  }
  if (inc_prev > 0.0 && inc_last >= 0.5 * inc_prev) return {Conv::Infinite, J};
  return {Conv::Indeterminate, J};
}

}  // namespace detail

/// Accessibility / enterability integrals at one endpoint, iterated toward
/// the reference point (defaults to the spec reference). Returned values are
/// extended reals; divergence is reported, never thrown.
inline FellerIntegrals feller_integrals(const DiffusionSpec& spec, Endpoint ep,
                                        double c_ref = std::numeric_limits<double>::quiet_NaN()) {
  double c = std::isnan(c_ref) ? spec.c : c_ref;
  if (!(c > spec.a && c < spec.b)) raise(Errc::InvalidSpec, "reference point outside (a,b)");
  double e = ep == Endpoint::Lower ? spec.a : spec.b;
  auto s = [&](double x) { return spec.s(x); };
  auto m = [&](double x) { return spec.m(x); };
  // access: iterated ds then dm  ==  int |m(c)-m(x)| d|s|(x)
  auto acc = detail::boundary_ladder(e, c, s, m);
  // enter: iterated dm then ds  ==  int |s(c)-s(x)| d|m|(x)
  auto ent = detail::boundary_ladder(e, c, m, s);
  FellerIntegrals out;
  auto pack = [](detail::LadderResult r) -> ExtReal {
    if (r.conv == detail::Conv::Finite) return {r.value, true};
    if (r.conv == detail::Conv::Infinite)
      return {std::numeric_limits<double>::infinity(), false};
    raise(Errc::IndeterminateDivergence,
          "cutoff ladder could not decide convergence; refine the ladder or the handles");
  };
  out.access = pack(acc);
  out.enter = pack(ent);
  return out;
}

/// Boundary type at one endpoint. Classification does not depend on the
/// reference point choice; `gamma` is the accessibility indicator.
inline BoundaryClass classify_boundary(const DiffusionSpec& spec, Endpoint ep) {
  FellerIntegrals I = feller_integrals(spec, ep);
  BoundaryClass r;
  r.accessible = I.access.finite;
  r.enterable = I.enter.finite;
  if (r.accessible && r.enterable) r.kind = BoundaryKind::Regular;
  else if (r.accessible) r.kind = BoundaryKind::Exit;
  else if (r.enterable) r.kind = BoundaryKind::Entrance;
  else r.kind = BoundaryKind::Natural;
  r.gamma = r.accessible ? 1.0 : 0.0;
  return r;
}

/// Scale / speed pair from drift and diffusion coefficients:
///   s'(x) = exp(-int_c^x 2 mu / sigma^2),  m' = 2 / (sigma^2 s').
/// Both are tabulated on a node set refined geometrically toward the
/// endpoints and interpolated piecewise-linearly.
inline DiffusionSpec from_sde(double a, double b, double c, const ScalarFn& mu,
                              const ScalarFn& sigma, std::size_t n_core = 2049) {
  if (!(a < c && c < b)) raise(Errc::InvalidSpec, "need a < c < b");
  const double L = b - a;
  std::vector<double> xs;
  const int bands = 20, subdiv = 4;
  double da = std::min(0.1 * L, 0.45 * (c - a));
  double db = std::min(0.1 * L, 0.45 * (b - c));
  // lower tail nodes, innermost first
  for (int j = bands; j >= 1; --j) {
    double lo = da * std::ldexp(1.0, -j), hi = da * std::ldexp(1.0, -(j - 1));
    for (int q = 0; q < subdiv; ++q) xs.push_back(a + lo + (hi - lo) * q / subdiv);
  }
  std::size_t core = n_core < 16 ? 16 : n_core;
  for (std::size_t i = 0; i <= core; ++i) xs.push_back(a + da + (L - da - db) * i / core);
  for (int j = bands; j >= 1; --j) {
    double lo = db * std::ldexp(1.0, -j), hi = db * std::ldexp(1.0, -(j - 1));
    for (int q = 0; q < subdiv; ++q) xs.push_back(b - (lo + (hi - lo) * q / subdiv));
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [&](double u, double v) { return std::fabs(u - v) < 1e-15 * L; }),
           xs.end());
  // force c onto the node set
  std::size_t ic = 0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (std::fabs(xs[i] - c) < std::fabs(xs[ic] - c)) ic = i;
  xs[ic] = c;

  const std::size_t n = xs.size();
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sg = sigma(xs[i]);
    if (!(sg > 0.0) || !std::isfinite(sg))
      raise(Errc::NonPositiveDiffusion, "sigma <= 0 at x = " + std::to_string(xs[i]));
    q[i] = 2.0 * mu(xs[i]) / (sg * sg);
  }
  // I(x) = int_c^x q, cumulative trapezoid in both directions from c
  std::vector<double> I(n, 0.0);
  for (std::size_t i = ic; i + 1 < n; ++i)
    I[i + 1] = I[i] + 0.5 * (q[i] + q[i + 1]) * (xs[i + 1] - xs[i]);
  for (std::size_t i = ic; i > 0; --i)
    I[i - 1] = I[i] - 0.5 * (q[i] + q[i - 1]) * (xs[i] - xs[i - 1]);
  std::vector<double> sprime(n), mdens(n);
  for (std::size_t i = 0; i < n; ++i) {
    sprime[i] = std::exp(-I[i]);
    if (!std::isfinite(sprime[i]) || !(sprime[i] > 0.0))
      raise(Errc::DivergentQuadrature, "scale density overflow at x = " + std::to_string(xs[i]));
    double sg = sigma(xs[i]);
    mdens[i] = 2.0 / (sg * sg * sprime[i]);
  }
  std::vector<double> sv(n, 0.0), mv(n, 0.0);
  for (std::size_t i = ic; i + 1 < n; ++i) {
    sv[i + 1] = sv[i] + 0.5 * (sprime[i] + sprime[i + 1]) * (xs[i + 1] - xs[i]);
    mv[i + 1] = mv[i] + 0.5 * (mdens[i] + mdens[i + 1]) * (xs[i + 1] - xs[i]);
  }
  for (std::size_t i = ic; i > 0; --i) {
    sv[i - 1] = sv[i] - 0.5 * (sprime[i] + sprime[i - 1]) * (xs[i] - xs[i - 1]);
    mv[i - 1] = mv[i] - 0.5 * (mdens[i] + mdens[i - 1]) * (xs[i] - xs[i - 1]);
  }
  ScalarFn s_tab = ScalarFn::from_table(xs, sv);
  ScalarFn m_tab = ScalarFn::from_table(std::move(xs), std::move(mv));
  DiffusionSpec d = DiffusionSpec::make(a, b, c, std::move(s_tab), std::move(m_tab));
  d.sde = Sde{mu, sigma};
  return d;
}

}  // namespace feller

#endif
