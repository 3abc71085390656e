#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "alcoint/errors.hpp"

namespace alcoint {

// A value in R ∪ {-inf, +inf}. Backed by a double (IEEE infinities represent
// the infinite tags exactly); NaN is rejected.
class ExtendedReal {
 public:
  ExtendedReal() : v_(0.0) {}
  ExtendedReal(double v) : v_(v) {  // NOLINT: implicit by design
    if (std::isnan(v)) throw ConfigError("extended real cannot be NaN");
  }

  static ExtendedReal plus_inf() {
    return ExtendedReal(std::numeric_limits<double>::infinity());
  }
  static ExtendedReal minus_inf() {
    return ExtendedReal(-std::numeric_limits<double>::infinity());
  }

  bool is_finite() const { return std::isfinite(v_); }
  bool is_inf() const { return std::isinf(v_); }
  bool is_zero() const { return v_ == 0.0; }

  // -1, 0, +1; defined for all variants.
  int sign() const { return (v_ > 0.0) - (v_ < 0.0); }

  // Finite payload; throws on the infinite tags.
  double value() const {
    if (!is_finite()) throw UsageError("extended real is infinite");
    return v_;
  }

  // Raw double, with ±inf passed through.
  double as_double() const { return v_; }

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.v_ == b.v_;
  }
  friend bool operator!=(const ExtendedReal& a, const ExtendedReal& b) {
    return !(a == b);
  }

  std::string str() const {
    if (v_ == std::numeric_limits<double>::infinity()) return "inf";
    if (v_ == -std::numeric_limits<double>::infinity()) return "-inf";
    return std::to_string(v_);
  }

 private:
  double v_;
};

using ExtVec = std::vector<ExtendedReal>;

}  // namespace alcoint
