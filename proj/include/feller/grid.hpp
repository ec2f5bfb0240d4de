#ifndef FELLER_GRID_HPP
#define FELLER_GRID_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "feller/diffusion.hpp"
#include "feller/errors.hpp"

namespace feller {

struct GridParams {
  std::size_t n = 2001;          // target node count, core + tails
  double tail_fraction = 0.05;   // fraction of (b - a) covered by each dyadic tail
  int tail_bands = 18;           // dyadic halvings per tail
  int min_band_cells = 4;
  int max_band_cells = 48;
  double r_ref = 2.0;            // rate scale used by the stiffness heuristics; callers
                                 // solving at rate r should pass max(2, r) here
  double growth_cap = 14.0;      // cap on sqrt(r_ref * |ds| * |dm|) from the reference
                                 // point; e^(2*cap) must stay well inside double range
                                 // so that the decaying solution survives cancellation
  double range_cap = 1e8;        // cap on |s|, |m| from the reference point
};

/// Interior node set shared by the analytic pipeline, the matrix oracle and
/// the simulator. Uniform core plus dyadic bands toward each endpoint; band
/// resolution follows the local eigenfunction oscillation scale. `s`, `m`
/// are tabulated with the normalization s(c) = m(c) = 0 and x[ic] == c.
/// Tails stop extending once the growth caps trip, so every stored value is
/// finite even when the handles blow up at an endpoint.
struct WorkGrid {
  double a = 0.0, b = 1.0;
  std::size_t ic = 0;
  std::vector<double> x, s, m;
  std::vector<double> m_mid;                    // speed values at cell midpoints, size n-1
  std::vector<std::size_t> anchors_a, anchors_b;  // dyadic anchor node ids, outermost -> innermost
  std::size_t core_lo = 0, core_hi = 0;         // inclusive index range of the uniform core

  std::size_t size() const { return x.size(); }

  /// Cell index i with x[i] <= xq <= x[i+1]; clamps inside the node hull.
  std::size_t locate(double xq) const {
    if (!(xq >= a && xq <= b)) raise(Errc::OutOfDomain, "x = " + std::to_string(xq));
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    if (i + 1 >= x.size()) i = x.size() - 2;
    return i;
  }

  double interp(const std::vector<double>& f, double xq) const {
    std::size_t i = locate(xq);
    double t = (xq - x[i]) / (x[i + 1] - x[i]);
    t = std::clamp(t, 0.0, 1.0);
    return f[i] + t * (f[i + 1] - f[i]);
  }
};

struct BoundaryLimit {
  double value = 0.0;
  bool finite = true;
};

namespace detail {

inline std::size_t nearest_index(const std::vector<double>& xs, double xq) {
  auto it = std::lower_bound(xs.begin(), xs.end(), xq);
  std::size_t i = static_cast<std::size_t>(it - xs.begin());
  if (i == xs.size()) return xs.size() - 1;
  if (i > 0 && std::fabs(xs[i - 1] - xq) < std::fabs(xs[i] - xq)) return i - 1;
  return i;
}

}  // namespace detail

inline WorkGrid build_grid(const DiffusionSpec& spec, GridParams P = {}) {
  const double L = spec.b - spec.a;
  if (!(L > 0.0) || !std::isfinite(L)) raise(Errc::InvalidSpec, "domain must be bounded");
  const double sc = spec.s(spec.c), mc = spec.m(spec.c);
  if (!std::isfinite(sc) || !std::isfinite(mc))
    raise(Errc::InvalidSpec, "scale/speed not finite at the reference point");

  auto tail_offsets = [&](double delta, bool lower) {
    // anchor offsets delta * 2^-j while the caps hold, at least three anchors
    std::vector<double> offs;
    for (int j = 0; j <= P.tail_bands; ++j) {
      double off = delta * std::ldexp(1.0, -j);
      double xx = lower ? spec.a + off : spec.b - off;
      double S = std::fabs(spec.s(xx) - sc), M = std::fabs(spec.m(xx) - mc);
      bool ok = std::isfinite(S) && std::isfinite(M) && S <= P.range_cap && M <= P.range_cap &&
                std::sqrt(P.r_ref * S * M) <= P.growth_cap;
      if (!ok && j > 2) break;
      if (!ok && j <= 2)
        raise(Errc::InvalidSpec, "scale/speed blow up inside the working interval");
      offs.push_back(off);
    }
    return offs;
  };

  const double da = std::min(P.tail_fraction * L, 0.45 * (spec.c - spec.a));
  const double db = std::min(P.tail_fraction * L, 0.45 * (spec.b - spec.c));
  std::vector<double> offs_a = tail_offsets(da, true);
  std::vector<double> offs_b = tail_offsets(db, false);

  auto band_cells = [&](double x0, double x1) {
    double ds = std::fabs(spec.s(x1) - spec.s(x0));
    double dm = std::fabs(spec.m(x1) - spec.m(x0));
    double k = std::ceil(std::sqrt(P.r_ref * ds * dm) / 0.2);
    int kc = static_cast<int>(std::clamp(k, double(P.min_band_cells), double(P.max_band_cells)));
    return kc;
  };

  std::vector<double> xs;
  std::vector<double> anchor_x_a, anchor_x_b;
  for (double off : offs_a) anchor_x_a.push_back(spec.a + off);
  for (double off : offs_b) anchor_x_b.push_back(spec.b - off);

  // lower tail: bands [a + d_{j+1}, a + d_j], nodes include the inner edge
  xs.push_back(spec.a + offs_a.back());
  for (std::size_t j = offs_a.size() - 1; j > 0; --j) {
    double lo = spec.a + offs_a[j], hi = spec.a + offs_a[j - 1];
    int k = band_cells(lo, hi);
    for (int q = 1; q < k; ++q) xs.push_back(lo + (hi - lo) * q / k);
    xs.push_back(hi);
  }
  std::size_t tail_a_count = xs.size();

  std::vector<double> xs_b;
  xs_b.push_back(spec.b - offs_b.back());
  for (std::size_t j = offs_b.size() - 1; j > 0; --j) {
    double hi = spec.b - offs_b[j], lo = spec.b - offs_b[j - 1];
    int k = band_cells(lo, hi);
    for (int q = 1; q < k; ++q) xs_b.push_back(hi - (hi - lo) * q / k);
    xs_b.push_back(lo);
  }

  long ncells = static_cast<long>(P.n) - 1 - static_cast<long>(tail_a_count + xs_b.size());
  std::size_t n_core = ncells < 32 ? 32 : static_cast<std::size_t>(ncells);
  double clo = spec.a + offs_a.front(), chi = spec.b - offs_b.front();
  for (std::size_t i = 1; i < n_core; ++i) xs.push_back(clo + (chi - clo) * i / n_core);
  xs.insert(xs.end(), xs_b.rbegin(), xs_b.rend());

  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [&](double u, double v) { return std::fabs(v - u) < 1e-14 * L; }),
           xs.end());
  xs[detail::nearest_index(xs, spec.c)] = spec.c;

  WorkGrid G;
  G.a = spec.a;
  G.b = spec.b;
  G.x = std::move(xs);
  const std::size_t n = G.x.size();
  G.ic = detail::nearest_index(G.x, spec.c);
  G.core_lo = detail::nearest_index(G.x, clo);
  G.core_hi = detail::nearest_index(G.x, chi);
  for (double ax : anchor_x_a) G.anchors_a.push_back(detail::nearest_index(G.x, ax));
  for (double bx : anchor_x_b) G.anchors_b.push_back(detail::nearest_index(G.x, bx));

  G.s.resize(n);
  G.m.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    G.s[i] = spec.s(G.x[i]) - sc;
    G.m[i] = spec.m(G.x[i]) - mc;
    if (!std::isfinite(G.s[i]) || !std::isfinite(G.m[i]))
      raise(Errc::InvalidSpec, "scale/speed not finite at x = " + std::to_string(G.x[i]));
  }
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(G.s[i] < G.s[i + 1]) || !(G.m[i] < G.m[i + 1]))
      raise(Errc::InvalidSpec, "scale/speed must be strictly increasing (cell at x = " +
                                   std::to_string(G.x[i]) + ")");
  G.m_mid.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double mm = spec.m(0.5 * (G.x[i] + G.x[i + 1])) - mc;
    // keep midpoint values inside the cell so downstream matrices stay monotone
    G.m_mid[i] = std::clamp(mm, G.m[i], G.m[i + 1]);
  }
  return G;
}

/// Signed cumulative Stieltjes trapezoid from node i0:
///   out[j] = integral from x[i0] to x[j] of f dw.
inline std::vector<double> cum_from(const std::vector<double>& f, const std::vector<double>& w,
                                    std::size_t i0) {
  std::vector<double> I(f.size(), 0.0);
  for (std::size_t i = i0; i + 1 < f.size(); ++i)
    I[i + 1] = I[i] + 0.5 * (f[i] + f[i + 1]) * (w[i + 1] - w[i]);
  for (std::size_t i = i0; i > 0; --i)
    I[i - 1] = I[i] - 0.5 * (f[i] + f[i - 1]) * (w[i] - w[i - 1]);
  return I;
}

inline double trapz(const std::vector<double>& f, const std::vector<double>& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i)
    acc += 0.5 * (f[i] + f[i + 1]) * (w[i + 1] - w[i]);
  return acc;
}

/// Endpoint limit from the dyadic anchor values. Offsets halve level by
/// level, so increments of a convergent sequence decay geometrically; the
/// geometric tail supplies the extrapolation and a non-decaying increment
/// diagnoses divergence with the sign of the last increment.
inline BoundaryLimit boundary_limit(const WorkGrid& G, const std::vector<double>& f, Endpoint ep) {
  const std::vector<std::size_t>& anchors = ep == Endpoint::Lower ? G.anchors_a : G.anchors_b;
  if (anchors.size() < 3) raise(Errc::GridTooCoarse, "need at least three dyadic anchors");
  std::vector<double> v;
  v.reserve(anchors.size());
  for (std::size_t id : anchors) v.push_back(f[id]);
  const std::size_t J = v.size() - 1;
  double dB = v[J] - v[J - 1];
  double dA = v[J - 1] - v[J - 2];
  double scale = std::max({std::fabs(v[J]), std::fabs(v[0]), 1.0});
  // increments at the rounding floor mean the value has settled
  if (std::max(std::fabs(dB), std::fabs(dA)) <= 1e-9 * scale) return {v[J], true};
  if (std::fabs(dB) <= 0.75 * std::fabs(dA)) {
    double rho = dB / dA;
    return {v[J] + dB * rho / (1.0 - rho), true};
  }
  return {std::copysign(std::numeric_limits<double>::infinity(), dB), false};
}

/// Three-point second difference in the (s, m) calculus at interior nodes;
/// entries 0 and n-1 are quiet NaN.
inline std::vector<double> discrete_generator(const WorkGrid& G, const std::vector<double>& f) {
  const std::size_t n = G.size();
  std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double dplus = (f[i + 1] - f[i]) / (G.s[i + 1] - G.s[i]);
    double dminus = (f[i] - f[i - 1]) / (G.s[i] - G.s[i - 1]);
    double dm = G.m_mid[i] - G.m_mid[i - 1];
    if (!(dm > 0.0)) raise(Errc::GridTooCoarse, "degenerate speed cell");
    out[i] = (dplus - dminus) / dm;
  }
  return out;
}

}  // namespace feller

#endif
