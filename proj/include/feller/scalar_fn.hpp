#ifndef FELLER_SCALAR_FN_HPP
#define FELLER_SCALAR_FN_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "feller/errors.hpp"

namespace feller {

/// Pointwise-evaluable scalar function of one variable: either a closed-form
/// callable or a table interpolated piecewise-linearly. Tables are extended
/// linearly beyond their end nodes with the end-cell slope.
class ScalarFn {
 public:
  ScalarFn() = default;

  static ScalarFn from_function(std::function<double(double)> f) {
    ScalarFn s;
    s.fn_ = std::move(f);
    return s;
  }

  /// `xs` strictly increasing; `ys` same length.
  static ScalarFn from_table(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
      raise(Errc::InvalidSpec, "table needs >= 2 rows and equal column lengths");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      if (!(xs[i + 1] > xs[i]))
        raise(Errc::InvalidSpec, "table abscissae not strictly increasing at row " +
                                     std::to_string(i + 1));
    ScalarFn s;
    s.table_ = std::make_shared<Table>(Table{std::move(xs), std::move(ys)});
    return s;
  }

  static ScalarFn constant(double v) {
    return from_function([v](double) { return v; });
  }

  bool valid() const { return fn_ || table_; }
  bool tabulated() const { return static_cast<bool>(table_); }

  double operator()(double x) const {
    if (fn_) return fn_(x);
    const auto& t = *table_;
    const auto& xs = t.xs;
    std::size_t n = xs.size();
    std::size_t j;
    if (x <= xs.front()) j = 0;
    else if (x >= xs[n - 2]) j = n - 2;
    else j = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
    double w = (x - xs[j]) / (xs[j + 1] - xs[j]);
    return t.ys[j] + w * (t.ys[j + 1] - t.ys[j]);
  }

  /// Strict-increase check over a sample of evaluation points.
  void check_strictly_increasing(const std::vector<double>& pts, const char* name) const {
    double prev = (*this)(pts.front());
    for (std::size_t i = 1; i < pts.size(); ++i) {
      double cur = (*this)(pts[i]);
      if (!(cur > prev) && pts[i] > pts[i - 1])
        raise(Errc::InvalidSpec,
              std::string(name) + " is not strictly increasing near x = " + std::to_string(pts[i]));
      prev = cur;
    }
  }

 private:
  struct Table {
    std::vector<double> xs, ys;
  };
  std::function<double(double)> fn_;
  std::shared_ptr<const Table> table_;
};

}  // namespace feller

#endif
