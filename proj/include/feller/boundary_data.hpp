#ifndef FELLER_BOUNDARY_DATA_HPP
#define FELLER_BOUNDARY_DATA_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "feller/errors.hpp"
#include "feller/grid.hpp"
#include "feller/scalar_fn.hpp"

namespace feller {

struct BoundaryAtom {
  double x = 0.0;
  double w = 0.0;
};

/// Jump measure attached to one endpoint: finite interior atoms plus an
/// optional density (against dx) on a closed sub-interval, plus an optional
/// atom on the far endpoint. `declared_infinite` marks the atoms/density as
/// a truncation of a measure with infinite mass near the owning endpoint;
/// the numerics always use the truncation.
struct BoundaryMeasure {
  std::vector<BoundaryAtom> atoms;
  ScalarFn density;
  double support_lo = 0.0, support_hi = 0.0;
  bool has_density = false;
  double endpoint_atom = 0.0;
  bool declared_infinite = false;

  bool interior_empty() const { return atoms.empty() && !has_density; }
  bool empty() const { return interior_empty() && endpoint_atom == 0.0 && !declared_infinite; }
};

enum class CaseTag { Auto, One, Two, Three, Four };

inline const char* case_name(CaseTag t) {
  switch (t) {
    case CaseTag::Auto: return "auto";
    case CaseTag::One: return "1";
    case CaseTag::Two: return "2";
    case CaseTag::Three: return "3";
    case CaseTag::Four: return "4";
  }
  return "?";
}

/// Boundary data (k1, k2, k3, k4) = (killing, reflection, stagnancy, jumps)
/// at each endpoint. p4 lives on (a,b] with its far atom at b; q4 lives on
/// [a,b) with its far atom at a. The irregular flags declare an entrance
/// endpoint irregular-for-itself (its own rates must then all vanish).
struct FellerBoundaryData {
  double p1 = 0.0, p2 = 0.0, p3 = 0.0;
  BoundaryMeasure p4;
  double q1 = 0.0, q2 = 0.0, q3 = 0.0;
  BoundaryMeasure q4;
  bool a_irregular = false, b_irregular = false;
  CaseTag case_tag = CaseTag::Auto;

  bool a_side_active() const { return p1 > 0.0 || p2 > 0.0 || p3 > 0.0 || !p4.empty(); }
  bool b_side_active() const { return q1 > 0.0 || q2 > 0.0 || q3 > 0.0 || !q4.empty(); }
};

/// Interior part of int f dmu and the interior mass, accumulated with one
/// shared partition so that int (f - f0) dmu cancels exactly for f constant.
struct MeasureSums {
  double integral = 0.0;
  double mass = 0.0;
};

inline MeasureSums measure_sums(const WorkGrid& G, const std::vector<double>& f,
                                const BoundaryMeasure& mu) {
  MeasureSums out;
  for (const BoundaryAtom& at : mu.atoms) {
    out.integral += at.w * G.interp(f, at.x);
    out.mass += at.w;
  }
  if (mu.has_density) {
    double lo = std::max(mu.support_lo, G.a);
    double hi = std::min(mu.support_hi, G.b);
    if (hi > lo) {
      double xa = lo;
      double ra = mu.density(xa), fa = G.interp(f, xa);
      std::size_t i = G.locate(lo) + 1;
      while (true) {
        double xb = i < G.size() && G.x[i] < hi ? G.x[i] : hi;
        double rb = mu.density(xb), fb = G.interp(f, xb);
        double dx = xb - xa;
        out.integral += 0.5 * (ra * fa + rb * fb) * dx;
        out.mass += 0.5 * (ra + rb) * dx;
        if (xb == hi) break;
        xa = xb;
        ra = rb;
        fa = fb;
        ++i;
      }
    }
  }
  return out;
}

inline double measure_mass(const WorkGrid& G, const BoundaryMeasure& mu) {
  std::vector<double> ones(G.size(), 1.0);
  return measure_sums(G, ones, mu).mass;
}

/// State-space case from the accessibility pattern. An inaccessible endpoint
/// belongs to the state space exactly when something happens there: its own
/// rates, a jump atom targeting it, or a declared irregular-entrance flag.
inline CaseTag derive_case(const FellerBoundaryData& D, bool acc_a, bool acc_b) {
  if (acc_a && acc_b) return CaseTag::Four;
  if (!acc_a && !acc_b) return CaseTag::Three;
  if (acc_a) {
    bool b_in = D.b_side_active() || D.p4.endpoint_atom > 0.0 || D.b_irregular;
    return b_in ? CaseTag::Two : CaseTag::One;
  }
  bool a_in = D.a_side_active() || D.q4.endpoint_atom > 0.0 || D.a_irregular;
  return a_in ? CaseTag::Two : CaseTag::One;
}

}  // namespace feller

#endif
