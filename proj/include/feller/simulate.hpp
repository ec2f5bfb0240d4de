#ifndef FELLER_SIMULATE_HPP
#define FELLER_SIMULATE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "feller/boundary_data.hpp"
#include "feller/diffusion.hpp"
#include "feller/errors.hpp"
#include "feller/grid.hpp"
#include "feller/grid_oracle.hpp"
#include "feller/rng.hpp"
#include "feller/scalar_fn.hpp"

namespace feller {

/// Piecewise-constant sample path. `times`/`states` record state entries, so
/// times are non-decreasing (zero-length entries mark instantaneous jumps).
/// The cemetery is recorded as NaN and is absorbing; nothing follows it.
struct PathSample {
  std::vector<double> times, states;
  double local_time_a = 0.0, local_time_b = 0.0;
  double stagnant_time_a = 0.0, stagnant_time_b = 0.0;
  bool killed = false;
  double kill_time = std::numeric_limits<double>::infinity();
  bool truncated = false;  // horizon ran out with the path still alive

  static double cemetery() { return std::numeric_limits<double>::quiet_NaN(); }
  static bool is_cemetery(double v) { return std::isnan(v); }
};

enum class ExcursionTerminal { HitA, HitB, Killed };
enum class ExcursionComponent { Dead, Reflection, Jump, FarAtom };

/// One draw from the eps-restricted excursion measure at an endpoint. `mass`
/// is the total mass of that finite measure, shared by all samples from it.
struct ExcursionSample {
  PathSample path;
  ExcursionTerminal terminal = ExcursionTerminal::HitA;
  double lifetime = 0.0;
  ExcursionComponent component = ExcursionComponent::Dead;
  double mass = 0.0;
};

/// Embedded birth-death chain of the minimal diffusion. Nodes cover the
/// interval with uniform step-scale h in the core; an accessible endpoint is
/// its own absorbing node, an inaccessible one is approached by a dyadic
/// tail whose deepest node steps back inward after its one-sided mean exit
/// time (clamped huge when that mean diverges, so discounts underflow and a
/// finite budget always terminates the walk).
struct SimChain {
  DiffusionSpec spec;
  std::vector<double> x, s;  // nodes; scale values with s(c) = 0
  std::vector<double> tau;   // mean exit time of (x[i-1], x[i+1]) started at x[i]
  std::vector<double> pdown; // P(next state is x[i-1] | at x[i])
  bool abs_lo = false, abs_hi = false;

  std::size_t size() const { return x.size(); }
  std::size_t node_at(double xq) const { return detail::nearest_index(x, xq); }
};

namespace detail {

constexpr double kParkTime = 1e300;  // stands in for a divergent mean exit time

// trapezoid of w against dm over [lo, hi]
template <class W>
double int_w_dm(const ScalarFn& m, W&& w, double lo, double hi, int sub) {
  double acc = 0.0;
  double xa = lo, ma = m(xa), wa = w(xa);
  for (int j = 1; j <= sub; ++j) {
    double xb = lo + (hi - lo) * j / sub;
    double mb = m(xb), wb = w(xb);
    if (!std::isfinite(mb))
      raise(Errc::DivergentQuadrature, "speed measure not finite at x = " + std::to_string(xb));
    acc += 0.5 * (wa + wb) * (mb - ma);
    xa = xb;
    ma = mb;
    wa = wb;
  }
  return acc;
}

// same integral when m has an integrable singularity at the `sing` end
// (accessible exit endpoint); dyadic shells toward it, w must vanish there
template <class W>
double int_w_dm_shell(const ScalarFn& m, W&& w, double lo, double hi, bool sing_at_lo) {
  double total = 0.0, prev = 0.0;
  double span = hi - lo;
  for (int k = 0; k < 60; ++k) {
    double o0 = span * std::ldexp(1.0, -(k + 1));
    double o1 = span * std::ldexp(1.0, -k);
    double z0 = sing_at_lo ? lo + o0 : hi - o1;
    double z1 = sing_at_lo ? lo + o1 : hi - o0;
    double inc = int_w_dm(m, w, z0, z1, 8);
    total += inc;
    if (k > 6 && std::fabs(inc) <= 1e-10 * std::fabs(total)) return total;
    if (k == 59 && prev > 0.0) {
      double ratio = inc / prev;
      if (ratio < 0.95) return total + inc * ratio / (1.0 - ratio);
    }
    prev = std::fabs(inc);
  }
  raise(Errc::DivergentQuadrature, "mean exit time diverges at an accessible endpoint");
}

// speed mass strictly below x0 toward the inaccessible endpoint e; +inf when
// the tail mass diverges (natural endpoint with infinite speed tail)
inline double tail_speed_mass(const ScalarFn& m, double e, double x0) {
  const double span = x0 - e;
  double total = 0.0, prev_inc = 0.0;
  double m_out = m(x0);
  if (!std::isfinite(m_out)) raise(Errc::InvalidSpec, "speed not finite at a tail node");
  for (int k = 1; k <= 60; ++k) {
    double z = e + span * std::ldexp(1.0, -k);
    double mz = m(z);
    if (!std::isfinite(mz)) return std::numeric_limits<double>::infinity();
    double inc = std::fabs(m_out - mz);
    m_out = mz;
    total += inc;
    if (k > 8 && inc <= 1e-10 * (total > 0.0 ? total : 1.0)) return total;
    if (k > 40 && inc >= 0.5 * prev_inc && inc > 1e-12)
      return std::numeric_limits<double>::infinity();
    prev_inc = inc;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace detail

inline SimChain build_sim_chain(const DiffusionSpec& spec, double h) {
  if (!(h > 0.0)) raise(Errc::InvalidSpec, "step-scale must be positive");
  const double L = spec.b - spec.a;
  if (L / h > 2e6) raise(Errc::InvalidSpec, "step-scale too small for the interval");

  BoundaryClass ca = classify_boundary(spec, Endpoint::Lower);
  BoundaryClass cb = classify_boundary(spec, Endpoint::Upper);
  const double sc = spec.s(spec.c), mc = spec.m(spec.c);

  // dyadic anchor offsets toward an inaccessible endpoint, outermost first,
  // cut off by the same growth caps the analytic grid uses
  auto tail_offsets = [&](bool lower, double d) {
    std::vector<double> offs;
    for (int j = 0; j <= 40; ++j) {
      double off = d * std::ldexp(1.0, -j);
      double xx = lower ? spec.a + off : spec.b - off;
      double S = std::fabs(spec.s(xx) - sc), M = std::fabs(spec.m(xx) - mc);
      bool ok = std::isfinite(S) && std::isfinite(M) && S <= 1e8 && M <= 1e8 &&
                std::sqrt(2.0 * S * M) <= 14.0;
      if (!ok && j > 2) break;
      if (!ok) raise(Errc::InvalidSpec, "scale/speed blow up inside the working interval");
      offs.push_back(off);
    }
    return offs;
  };

  SimChain C;
  C.spec = spec;
  C.abs_lo = ca.accessible;
  C.abs_hi = cb.accessible;

  const double da = std::min(0.05 * L, 0.45 * (spec.c - spec.a));
  const double db = std::min(0.05 * L, 0.45 * (spec.b - spec.c));
  std::vector<double> ta = C.abs_lo ? std::vector<double>{} : tail_offsets(true, da);
  std::vector<double> tb = C.abs_hi ? std::vector<double>{} : tail_offsets(false, db);

  const double lo_edge = C.abs_lo ? spec.a : spec.a + ta.front();
  const double hi_edge = C.abs_hi ? spec.b : spec.b - tb.front();
  std::size_t ncore = static_cast<std::size_t>(std::ceil((hi_edge - lo_edge) / h));
  if (ncore < 3) raise(Errc::GridTooCoarse, "step-scale too coarse for the interval");

  for (std::size_t j = ta.size(); j-- > 1;) C.x.push_back(spec.a + ta[j]);
  for (std::size_t i = 0; i <= ncore; ++i)
    C.x.push_back(lo_edge + (hi_edge - lo_edge) * static_cast<double>(i) / ncore);
  for (std::size_t j = 1; j < tb.size(); ++j) C.x.push_back(spec.b - tb[j]);

  const std::size_t M = C.x.size();
  for (std::size_t i = 0; i + 1 < M; ++i)
    if (!(C.x[i] < C.x[i + 1])) raise(Errc::GridTooCoarse, "chain nodes collide");

  C.s.resize(M);
  for (std::size_t i = 0; i < M; ++i) {
    C.s[i] = spec.s(C.x[i]) - sc;
    if (!std::isfinite(C.s[i])) raise(Errc::InvalidSpec, "scale not finite at a chain node");
  }

  C.tau.assign(M, 0.0);
  C.pdown.assign(M, 0.0);

  // half-cell integral of the two-point exit kernel against dm; the halves
  // touching an accessible endpoint go through the shell ladder when the
  // speed diverges there (exit endpoint)
  auto half = [&](double zlo, double zhi, auto&& w, bool shell_lo, bool shell_hi) {
    if (shell_lo) return detail::int_w_dm_shell(spec.m, w, zlo, zhi, true);
    if (shell_hi) return detail::int_w_dm_shell(spec.m, w, zlo, zhi, false);
    return detail::int_w_dm(spec.m, w, zlo, zhi, 12);
  };
  const bool m_sing_a = C.abs_lo && !std::isfinite(spec.m(spec.a));
  const bool m_sing_b = C.abs_hi && !std::isfinite(spec.m(spec.b));

  for (std::size_t i = 1; i + 1 < M; ++i) {
    const double s0 = C.s[i - 1], s1 = C.s[i], s2 = C.s[i + 1];
    const double den = s2 - s0;
    C.pdown[i] = (s2 - s1) / den;
    auto wl = [&](double z) { return (spec.s(z) - sc - s0) * (s2 - s1) / den; };
    auto wr = [&](double z) { return (s1 - s0) * (s2 - (spec.s(z) - sc)) / den; };
    double t = half(C.x[i - 1], C.x[i], wl, i == 1 && m_sing_a, false) +
               half(C.x[i], C.x[i + 1], wr, false, i + 2 == M && m_sing_b);
    if (!std::isfinite(t) || t <= 0.0)
      raise(Errc::DivergentQuadrature, "mean exit time not positive at a chain node");
    C.tau[i] = t;
  }

  // deepest tail node on an inaccessible side: always steps inward, holding
  // for the one-sided mean exit time; infinite tail mass parks the walk
  auto tail_tau = [&](double edge, std::size_t id, std::size_t iin) {
    double gap = std::fabs(C.s[iin] - C.s[id]);
    double mass = detail::tail_speed_mass(spec.m, edge, C.x[id]);
    double sin_ = C.s[iin];
    auto w = [&](double z) { return std::fabs(sin_ - (spec.s(z) - sc)); };
    double local = detail::int_w_dm(spec.m, w, std::min(C.x[id], C.x[iin]),
                                    std::max(C.x[id], C.x[iin]), 12);
    double t = gap * mass + local;
    if (!std::isfinite(t) || t > detail::kParkTime) return detail::kParkTime;
    return std::max(t, 1e-300);
  };
  if (!C.abs_lo) {
    C.pdown[0] = 0.0;
    C.tau[0] = tail_tau(spec.a, 0, 1);
  }
  if (!C.abs_hi) {
    C.pdown[M - 1] = 1.0;
    C.tau[M - 1] = tail_tau(spec.b, M - 1, M - 2);
  }
  return C;
}

namespace detail {

enum class WalkEnd { Lo, Hi, Budget };

struct WalkResult {
  WalkEnd end = WalkEnd::Budget;
  double time = 0.0;
  std::size_t node = 0;
};

// hold(i, dt) fires for every holding interval including the final clamped
// one; step(i, t_local) fires on each move, including the absorbing arrival
template <class Hold, class Step>
WalkResult run_walk(const SimChain& C, std::size_t i, double budget, Rng& rng, Hold&& hold,
                    Step&& step) {
  double t = 0.0;
  while (true) {
    double dt = C.tau[i];
    if (!(t + dt < budget)) {
      double rem = budget - t;
      if (rem > 0.0) hold(i, rem);
      return {WalkEnd::Budget, budget, i};
    }
    hold(i, dt);
    t += dt;
    if (rng.uniform() < C.pdown[i]) {
      --i;
      step(i, t);
      if (i == 0 && C.abs_lo) return {WalkEnd::Lo, t, 0};
    } else {
      ++i;
      step(i, t);
      if (i + 1 == C.size() && C.abs_hi) return {WalkEnd::Hi, t, i};
    }
  }
}

}  // namespace detail

/// Prepared arrival mechanism of one endpoint: total eps-restricted excursion
/// mass split into killing, reflection (started at the snapped offset node),
/// interior jumps (lumped onto chain nodes) and the far-endpoint atom.
struct SideMech {
  bool present = false;
  bool accessible = false;
  bool irregular = false;
  double varsigma = 0.0;
  double k1 = 0.0, k2 = 0.0, k4int = 0.0, k4far = 0.0;
  double total = 0.0;
  std::size_t refl_node = 0, entry_node = 0;
  double endpoint_x = 0.0;
  std::vector<double> jump_cum;
  std::vector<std::size_t> jump_node;

  std::size_t sample_jump(Rng& rng) const {
    double u = rng.uniform() * k4int;
    auto it = std::lower_bound(jump_cum.begin(), jump_cum.end(), u);
    std::size_t k = static_cast<std::size_t>(it - jump_cum.begin());
    if (k >= jump_node.size()) k = jump_node.size() - 1;
    return jump_node[k];
  }
};

inline std::pair<SideMech, SideMech> build_mechanisms(const SimChain& C,
                                                      const FellerBoundaryData& D, double eps) {
  const double a = C.spec.a, b = C.spec.b;
  if (!(eps > 0.0) || eps > 0.5 * (b - a))
    raise(Errc::InvalidEps, "eps must lie in (0, (b-a)/2]");
  const std::size_t M = C.size();

  auto one_side = [&](bool lower) {
    SideMech m;
    m.accessible = lower ? C.abs_lo : C.abs_hi;
    m.irregular = lower ? D.a_irregular : D.b_irregular;
    m.varsigma = lower ? D.p3 : D.q3;
    m.k1 = lower ? D.p1 : D.q1;
    m.endpoint_x = lower ? a : b;
    m.entry_node = lower ? 0 : M - 1;
    const double k2raw = lower ? D.p2 : D.q2;
    const BoundaryMeasure& mu = lower ? D.p4 : D.q4;
    const BoundaryMeasure& far_from = lower ? D.q4 : D.p4;
    m.present = m.accessible || (lower ? D.a_side_active() : D.b_side_active()) ||
                far_from.endpoint_atom > 0.0 || m.irregular;

    if (k2raw > 0.0) {
      if (!m.accessible)
        raise(Errc::InvalidBoundaryData, "reflection at an unreachable endpoint");
      std::size_t i = C.node_at(lower ? a + eps : b - eps);
      i = std::clamp<std::size_t>(i, 1, M - 2);
      m.refl_node = i;
      double gap = std::fabs(C.s[i] - (lower ? C.s[0] : C.s[M - 1]));
      if (!(gap > 0.0)) raise(Errc::InvalidEps, "eps collapsed onto the endpoint");
      m.k2 = k2raw / gap;
    }

    std::vector<double> w = detail::lump_measure(C.x, mu, a, b);
    double cum = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      if (w[j] <= 0.0) continue;
      if (j == m.entry_node) continue;  // mass on the owning endpoint pairs to nothing
      cum += w[j];
      m.jump_cum.push_back(cum);
      m.jump_node.push_back(j);
    }
    m.k4int = cum;
    m.k4far = mu.endpoint_atom;
    m.total = m.k1 + m.k2 + m.k4int + m.k4far;
    return m;
  };
  return {one_side(true), one_side(false)};
}

namespace detail {

struct PathStats {
  double local_a = 0.0, local_b = 0.0;
  double stagnant_a = 0.0, stagnant_b = 0.0;
  bool killed = false, truncated = false;
  double kill_time = std::numeric_limits<double>::infinity();
  double end_time = 0.0;
  bool end_at_endpoint = false;
  std::size_t end_node = 0;
  double end_x = 0.0;
};

// Optional sink hook: sinks that expose set_tag(const char*) receive, before
// each enter, the mechanism that produced the upcoming entry.
template <class Sink>
inline void sink_tag(Sink& sink, const char* tag) {
  if constexpr (requires { sink.set_tag(tag); }) sink.set_tag(tag);
}

// Assembles one path from the endpoint mechanisms and the chain walk.
// Sink interface: enter(t, x) on every state entry, hold_node(i, dt),
// hold_endpoint(lower, dt), kill(t).
template <class Sink>
void run_path(const SimChain& C, const SideMech& ma, const SideMech& mb, double horizon,
              int side, std::size_t node, Rng& rng, Sink& sink, PathStats& st) {
  const std::size_t M = C.size();
  double t = 0.0;
  std::uint64_t events = 0;
  sink_tag(sink, "start");
  sink.enter(0.0, side == 2 ? C.x[node] : (side == 0 ? ma.endpoint_x : mb.endpoint_x));

  auto finish = [&](bool at_endpoint, int endside, std::size_t n) {
    st.end_time = t;
    st.end_at_endpoint = at_endpoint;
    st.end_node = n;
    st.end_x = at_endpoint ? (endside == 0 ? ma.endpoint_x : mb.endpoint_x) : C.x[n];
  };

  while (true) {
    if (++events > 50000000ULL)
      raise(Errc::NoConvergence, "path event budget exhausted");
    if (side == 2) {
      double t0 = t;
      auto hold = [&](std::size_t i, double dt) { sink.hold_node(i, dt); };
      auto step = [&](std::size_t i, double tl) {
        bool at_edge = (i == 0 && C.abs_lo) || (i + 1 == M && C.abs_hi);
        sink_tag(sink, at_edge ? "boundary" : "move");
        sink.enter(t0 + tl, C.x[i]);
      };
      WalkResult w = run_walk(C, node, horizon - t, rng, hold, step);
      t = t0 + w.time;
      if (w.end == WalkEnd::Budget) {
        st.truncated = true;
        finish(false, 0, w.node);
        return;
      }
      side = w.end == WalkEnd::Lo ? 0 : 1;
      continue;
    }

    const SideMech& m = side == 0 ? ma : mb;
    double& loc = side == 0 ? st.local_a : st.local_b;
    double& stag = side == 0 ? st.stagnant_a : st.stagnant_b;

    if (m.irregular) {
      // irregular-for-itself entrance: one standard-exponential local-time
      // tick per visit, no stagnancy, then the path enters the interior
      loc += rng.exponential(1.0);
      node = m.entry_node;
      side = 2;
      sink_tag(sink, "entrance");
      sink.enter(t, C.x[node]);
      continue;
    }

    if (!(m.total > 0.0)) {
      // nothing arrives: the endpoint is a trap; local time still runs at
      // rate 1/varsigma when stagnancy is positive
      double rem = horizon - t;
      if (rem > 0.0) {
        sink.hold_endpoint(side == 0, rem);
        stag += rem;
        if (m.varsigma > 0.0) loc += rem / m.varsigma;
      }
      t = horizon;
      finish(true, side, 0);
      return;
    }

    double dl = rng.exponential(1.0 / m.total);
    double dt = m.varsigma * dl;
    if (!(t + dt < horizon)) {
      double rem = horizon - t;
      if (rem > 0.0) sink.hold_endpoint(side == 0, rem);
      stag += rem;
      loc += m.varsigma > 0.0 ? rem / m.varsigma : dl;
      t = horizon;
      st.truncated = true;
      finish(true, side, 0);
      return;
    }
    if (dt > 0.0) sink.hold_endpoint(side == 0, dt);
    stag += dt;
    loc += dl;
    t += dt;

    double u = rng.uniform() * m.total;
    if (u < m.k1) {
      sink.kill(t);
      st.killed = true;
      st.kill_time = t;
      st.end_time = t;
      return;
    }
    if (u < m.k1 + m.k2) {
      node = m.refl_node;
      side = 2;
      sink_tag(sink, "reflect");
      sink.enter(t, C.x[node]);
      continue;
    }
    if (u < m.k1 + m.k2 + m.k4int) {
      std::size_t j = m.sample_jump(rng);
      sink_tag(sink, "jump");
      if (j == 0 && C.abs_lo) {
        side = 0;
        sink.enter(t, ma.endpoint_x);
      } else if (j + 1 == M && C.abs_hi) {
        side = 1;
        sink.enter(t, mb.endpoint_x);
      } else {
        node = j;
        side = 2;
        sink.enter(t, C.x[j]);
      }
      continue;
    }
    side = 1 - side;
    sink_tag(sink, "cross");
    sink.enter(t, side == 0 ? ma.endpoint_x : mb.endpoint_x);
  }
}

struct RecordSink {
  PathSample* P;
  const SimChain* C;
  void enter(double t, double x) {
    if (P->times.size() > 20000000ULL)
      raise(Errc::NoConvergence, "path event budget exhausted");
    P->times.push_back(t);
    P->states.push_back(x);
  }
  void hold_node(std::size_t, double) {}
  void hold_endpoint(bool, double) {}
  void kill(double t) {
    P->times.push_back(t);
    P->states.push_back(PathSample::cemetery());
  }
};

// RecordSink plus one mechanism tag per recorded row
struct TagRecordSink {
  PathSample* P;
  std::vector<std::string>* tags;
  const char* cur = "start";
  void set_tag(const char* t) { cur = t; }
  void enter(double t, double x) {
    if (P->times.size() > 20000000ULL)
      raise(Errc::NoConvergence, "path event budget exhausted");
    P->times.push_back(t);
    P->states.push_back(x);
    tags->push_back(cur);
  }
  void hold_node(std::size_t, double) {}
  void hold_endpoint(bool, double) {}
  void kill(double t) {
    P->times.push_back(t);
    P->states.push_back(PathSample::cemetery());
    tags->push_back("dead");
  }
};

// discounted g-integral accumulator over one path at fixed rate r
struct DiscountSink {
  double r = 0.0;
  const std::vector<double>* etau = nullptr;  // exp(-r tau) per node
  const std::vector<double>* gfac = nullptr;  // g (1 - exp(-r tau)) / r per node
  const std::vector<double>* gnode = nullptr;
  double g_a = 0.0, g_b = 0.0;
  double D = 1.0, val = 0.0;
  const SimChain* C = nullptr;

  void enter(double, double) {}
  void hold_node(std::size_t i, double dt) {
    if (dt == (*C).tau[i]) {
      val += D * (*gfac)[i];
      D *= (*etau)[i];
    } else {
      general((*gnode)[i], dt);
    }
  }
  void hold_endpoint(bool lower, double dt) { general(lower ? g_a : g_b, dt); }
  void kill(double) {}
  void general(double gx, double dt) {
    val += D * gx * (-std::expm1(-r * dt)) / r;
    D *= std::exp(-r * dt);
  }
};

inline double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 16) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline std::pair<double, double> mean_and_stderr(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = pairwise_sum(v, 0, v.size()) / n;
  if (v.size() < 2) return {mean, 0.0};
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  double var = pairwise_sum(sq, 0, sq.size()) / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace detail

/// Minimal-diffusion sample path from an interior point. The walk absorbs at
/// accessible endpoints; toward inaccessible ones it reflects off the dyadic
/// tail (a divergent tail parks it until the internal budget runs out, which
/// flags the path truncated).
inline PathSample sample_minimal_path(const DiffusionSpec& spec, double x0, double h, Rng& rng) {
  if (!(x0 > spec.a && x0 < spec.b)) raise(Errc::OutOfDomain, "x0 must be interior");
  SimChain C = build_sim_chain(spec, h);
  std::size_t i = std::clamp<std::size_t>(C.node_at(x0), 1, C.size() - 2);

  PathSample P;
  P.times.push_back(0.0);
  P.states.push_back(C.x[i]);
  auto hold = [](std::size_t, double) {};
  auto step = [&](std::size_t j, double tl) {
    P.times.push_back(tl);
    P.states.push_back(C.x[j]);
  };
  detail::WalkResult w = detail::run_walk(C, i, 1e15, rng, hold, step);
  P.truncated = w.end == detail::WalkEnd::Budget;
  return P;
}

/// One draw from the eps-restricted excursion measure at `side`. Component
/// probabilities follow the masses: killing k1, reflection k2/s(e, e+-eps)
/// started at the snapped offset node, interior jumps by their lumped
/// weights, and the far-endpoint atom as an instantaneous crossing.
inline ExcursionSample sample_excursion(const FellerBoundaryData& D, const DiffusionSpec& spec,
                                        double eps, Rng& rng,
                                        Endpoint side = Endpoint::Lower) {
  SimChain C = build_sim_chain(spec, std::min(eps, (spec.b - spec.a) / 64.0));
  auto mechs = build_mechanisms(C, D, eps);
  const bool lower = side == Endpoint::Lower;
  const SideMech& m = lower ? mechs.first : mechs.second;
  if (!(m.total > 0.0)) raise(Errc::MissingEndpointData, "excursion measure has zero mass");

  ExcursionSample E;
  E.mass = m.total;
  const double e_x = m.endpoint_x;
  const double far_x = lower ? spec.b : spec.a;
  E.path.times.push_back(0.0);
  E.path.states.push_back(e_x);

  double u = rng.uniform() * m.total;
  std::size_t start;
  if (u < m.k1) {
    E.component = ExcursionComponent::Dead;
    E.terminal = ExcursionTerminal::Killed;
    E.path.killed = true;
    E.path.kill_time = 0.0;
    E.path.times.push_back(0.0);
    E.path.states.push_back(PathSample::cemetery());
    return E;
  } else if (u < m.k1 + m.k2) {
    E.component = ExcursionComponent::Reflection;
    start = m.refl_node;
  } else if (u < m.k1 + m.k2 + m.k4int) {
    E.component = ExcursionComponent::Jump;
    start = m.sample_jump(rng);
  } else {
    E.component = ExcursionComponent::FarAtom;
    E.terminal = lower ? ExcursionTerminal::HitB : ExcursionTerminal::HitA;
    E.path.times.push_back(0.0);
    E.path.states.push_back(far_x);
    return E;
  }

  E.path.times.push_back(0.0);
  E.path.states.push_back(C.x[start]);
  auto hold = [](std::size_t, double) {};
  auto step = [&](std::size_t j, double tl) {
    E.path.times.push_back(tl);
    E.path.states.push_back(C.x[j]);
  };
  detail::WalkResult w = detail::run_walk(C, start, 1e15, rng, hold, step);
  E.lifetime = w.time;
  if (w.end == detail::WalkEnd::Budget) {
    E.path.truncated = true;
    E.terminal = lower ? ExcursionTerminal::HitA : ExcursionTerminal::HitB;
  } else {
    E.terminal = w.end == detail::WalkEnd::Lo ? ExcursionTerminal::HitA : ExcursionTerminal::HitB;
  }
  return E;
}

/// Path of the extended process started at an endpoint: exponential
/// local-time gaps between excursion arrivals, stagnancy varsigma dl of real
/// time per gap, walks for the interior pieces, endpoint hand-offs through
/// hits, jumps and far atoms. Horizon exhaustion returns the path truncated.
inline PathSample assemble_path(const FellerBoundaryData& D, const DiffusionSpec& spec,
                                double horizon, double eps, Rng& rng,
                                Endpoint start = Endpoint::Lower) {
  if (!(horizon > 0.0)) raise(Errc::InvalidSpec, "horizon must be positive");
  SimChain C = build_sim_chain(spec, std::min(eps, (spec.b - spec.a) / 64.0));
  auto mechs = build_mechanisms(C, D, eps);
  const SideMech& m0 = start == Endpoint::Lower ? mechs.first : mechs.second;
  if (!m0.present) raise(Errc::NotInDomain, "starting endpoint is not in the state space");

  PathSample P;
  detail::RecordSink sink{&P, &C};
  detail::PathStats st;
  detail::run_path(C, mechs.first, mechs.second, horizon, start == Endpoint::Lower ? 0 : 1, 0,
                   rng, sink, st);
  P.local_time_a = st.local_a;
  P.local_time_b = st.local_b;
  P.stagnant_time_a = st.stagnant_a;
  P.stagnant_time_b = st.stagnant_b;
  P.killed = st.killed;
  P.kill_time = st.kill_time;
  P.truncated = st.truncated;
  return P;
}

/// Path plus one mechanism tag per recorded row: "start", "move" (chain
/// step), "boundary" (hits an accessible endpoint), "reflect", "jump",
/// "cross" (far-endpoint atom), "entrance" (irregular re-entry), "dead".
struct TaggedPath {
  PathSample path;
  std::vector<std::string> tags;
};

/// Like assemble_path but starting anywhere in the state space: x0 equal to
/// an endpoint (exact compare) starts on that side, interior x0 starts at
/// the nearest chain node.
inline TaggedPath assemble_path_tagged(const FellerBoundaryData& D, const DiffusionSpec& spec,
                                       double horizon, double eps, Rng& rng, double x0) {
  if (!(horizon > 0.0)) raise(Errc::InvalidSpec, "horizon must be positive");
  SimChain C = build_sim_chain(spec, std::min(eps, (spec.b - spec.a) / 64.0));
  auto mechs = build_mechanisms(C, D, eps);

  int side;
  std::size_t node = 0;
  if (x0 == spec.a) {
    if (!mechs.first.present) raise(Errc::NotInDomain, "x0 is not in the state space");
    side = 0;
  } else if (x0 == spec.b) {
    if (!mechs.second.present) raise(Errc::NotInDomain, "x0 is not in the state space");
    side = 1;
  } else if (x0 > spec.a && x0 < spec.b) {
    side = 2;
    node = std::clamp<std::size_t>(C.node_at(x0), 1, C.size() - 2);
  } else {
    raise(Errc::OutOfDomain, "x0 outside [a, b]");
  }

  TaggedPath T;
  detail::TagRecordSink sink{&T.path, &T.tags, "start"};
  detail::PathStats st;
  detail::run_path(C, mechs.first, mechs.second, horizon, side, node, rng, sink, st);
  T.path.local_time_a = st.local_a;
  T.path.local_time_b = st.local_b;
  T.path.stagnant_time_a = st.stagnant_a;
  T.path.stagnant_time_b = st.stagnant_b;
  T.path.killed = st.killed;
  T.path.kill_time = st.kill_time;
  T.path.truncated = st.truncated;
  return T;
}

struct ResolventEstimate {
  double value = 0.0, std_error = 0.0;
  std::uint64_t n_paths = 0, truncated = 0, killed = 0;
  double horizon = 0.0, eps = 0.0;
};

/// Monte Carlo resolvent at x0: discounted g-integral along assembled paths
/// with horizon ln(100 n)/r and an exact g(X_end)/r tail completion for
/// paths alive at the horizon (killed paths complete with zero). Per-path
/// counter-seeded streams and pairwise reduction make the estimate
/// bit-reproducible for fixed (seed, inputs).
inline ResolventEstimate mc_resolvent(const FellerBoundaryData& D, const DiffusionSpec& spec,
                                      const ScalarFn& g, double r, double x0,
                                      std::uint64_t n_paths, double eps, std::uint64_t seed) {
  if (!(r > 0.0)) raise(Errc::InvalidSpec, "rate must be positive");
  if (n_paths == 0) raise(Errc::InvalidSpec, "need at least one path");
  SimChain C = build_sim_chain(spec, std::min(eps, (spec.b - spec.a) / 64.0));
  auto mechs = build_mechanisms(C, D, eps);
  const std::size_t M = C.size();

  int side;
  std::size_t node = 0;
  if (x0 == spec.a) {
    if (!mechs.first.present) raise(Errc::NotInDomain, "x0 is not in the state space");
    side = 0;
  } else if (x0 == spec.b) {
    if (!mechs.second.present) raise(Errc::NotInDomain, "x0 is not in the state space");
    side = 1;
  } else if (x0 > spec.a && x0 < spec.b) {
    side = 2;
    node = std::clamp<std::size_t>(C.node_at(x0), 1, M - 2);
  } else {
    raise(Errc::OutOfDomain, "x0 outside [a, b]");
  }

  const double horizon = std::log(100.0 * static_cast<double>(n_paths)) / r;
  std::vector<double> gnode(M), etau(M), gfac(M);
  for (std::size_t i = 0; i < M; ++i) {
    gnode[i] = g(C.x[i]);
    if (!std::isfinite(gnode[i])) raise(Errc::UnboundedIntegrand, "g not finite at a node");
    etau[i] = std::exp(-r * C.tau[i]);
    gfac[i] = gnode[i] * (1.0 - etau[i]) / r;
  }
  const double g_a = g(spec.a), g_b = g(spec.b);
  if (!std::isfinite(g_a) || !std::isfinite(g_b))
    raise(Errc::UnboundedIntegrand, "g not finite at an endpoint");

  ResolventEstimate out;
  out.n_paths = n_paths;
  out.horizon = horizon;
  out.eps = eps;
  std::vector<double> vals(n_paths);
  for (std::uint64_t p = 0; p < n_paths; ++p) {
    Rng rng = Rng::for_path(seed, p);
    detail::DiscountSink sink;
    sink.r = r;
    sink.etau = &etau;
    sink.gfac = &gfac;
    sink.gnode = &gnode;
    sink.g_a = g_a;
    sink.g_b = g_b;
    sink.C = &C;
    detail::PathStats st;
    detail::run_path(C, mechs.first, mechs.second, horizon, side, node, rng, sink, st);
    double v = sink.val;
    if (st.killed) {
      ++out.killed;
    } else {
      double gend = st.end_at_endpoint ? (st.end_x == spec.a ? g_a : g_b) : gnode[st.end_node];
      v += sink.D * gend / r;
      if (st.truncated) ++out.truncated;
    }
    vals[p] = v;
  }
  auto ms = detail::mean_and_stderr(vals);
  out.value = ms.first;
  out.std_error = ms.second;
  return out;
}

/// Per-excursion discounted functionals of the eps-restricted measure at one
/// endpoint, scaled by its mass: psi = varsigma r + mass avg(1 - e^{-r T_ret}),
/// n_g = varsigma g(e) + mass avg(int e^{-rt} g dt), h = mass avg(e^{-r T_far}).
/// Walks run to the internal cutoff 30/r, beyond which the discount is dead.
struct ExcursionFunctionals {
  double psi = 0.0, psi_se = 0.0;
  double n_g = 0.0, n_g_se = 0.0;
  double h = 0.0, h_se = 0.0;
  double mass = 0.0;
  std::uint64_t n_samples = 0;
};

inline ExcursionFunctionals mc_excursion_functionals(const FellerBoundaryData& D,
                                                     const DiffusionSpec& spec, const ScalarFn& g,
                                                     double r, std::uint64_t n_samples, double eps,
                                                     std::uint64_t seed,
                                                     Endpoint side = Endpoint::Lower) {
  if (!(r > 0.0)) raise(Errc::InvalidSpec, "rate must be positive");
  if (n_samples == 0) raise(Errc::InvalidSpec, "need at least one sample");
  SimChain C = build_sim_chain(spec, std::min(eps, (spec.b - spec.a) / 64.0));
  auto mechs = build_mechanisms(C, D, eps);
  const bool lower = side == Endpoint::Lower;
  const SideMech& m = lower ? mechs.first : mechs.second;
  if (!(m.total > 0.0)) raise(Errc::MissingEndpointData, "excursion measure has zero mass");

  const std::size_t M = C.size();
  std::vector<double> gnode(M), etau(M), gfac(M);
  for (std::size_t i = 0; i < M; ++i) {
    gnode[i] = g(C.x[i]);
    if (!std::isfinite(gnode[i])) raise(Errc::UnboundedIntegrand, "g not finite at a node");
    etau[i] = std::exp(-r * C.tau[i]);
    gfac[i] = gnode[i] * (1.0 - etau[i]) / r;
  }
  const double budget = 30.0 / r;

  std::vector<double> vpsi(n_samples), vn(n_samples), vh(n_samples);
  for (std::uint64_t k = 0; k < n_samples; ++k) {
    Rng rng = Rng::for_path(seed, k);
    double psi_k = 1.0, n_k = 0.0, h_k = 0.0;
    double u = rng.uniform() * m.total;
    if (u < m.k1) {
      // killed excursion: never returns, integrates nothing
    } else if (u >= m.k1 + m.k2 + m.k4int) {
      h_k = 1.0;  // far atom crosses instantly, undiscounted
    } else {
      std::size_t start = u < m.k1 + m.k2 ? m.refl_node : m.sample_jump(rng);
      double Dd = 1.0, acc = 0.0;
      auto hold = [&](std::size_t i, double dt) {
        if (dt == C.tau[i]) {
          acc += Dd * gfac[i];
          Dd *= etau[i];
        } else {
          acc += Dd * gnode[i] * (-std::expm1(-r * dt)) / r;
          Dd *= std::exp(-r * dt);
        }
      };
      auto step = [](std::size_t, double) {};
      detail::WalkResult w = detail::run_walk(C, start, budget, rng, hold, step);
      n_k = acc;
      bool returned = (lower && w.end == detail::WalkEnd::Lo) ||
                      (!lower && w.end == detail::WalkEnd::Hi);
      bool crossed = (lower && w.end == detail::WalkEnd::Hi) ||
                     (!lower && w.end == detail::WalkEnd::Lo);
      if (returned) psi_k = 1.0 - Dd;
      if (crossed) h_k = Dd;
    }
    vpsi[k] = psi_k;
    vn[k] = n_k;
    vh[k] = h_k;
  }

  const double e_x = m.endpoint_x;
  ExcursionFunctionals out;
  out.mass = m.total;
  out.n_samples = n_samples;
  auto mp = detail::mean_and_stderr(vpsi);
  auto mn = detail::mean_and_stderr(vn);
  auto mh = detail::mean_and_stderr(vh);
  out.psi = m.varsigma * r + m.total * mp.first;
  out.psi_se = m.total * mp.second;
  out.n_g = m.varsigma * g(e_x) + m.total * mn.first;
  out.n_g_se = m.total * mn.second;
  out.h = m.total * mh.first;
  out.h_se = m.total * mh.second;
  return out;
}

}  // namespace feller

#endif
