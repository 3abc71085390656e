#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "alcoint/errors.hpp"

namespace alcoint {

// Deterministic tuning-parameter sequence lambda_T. Const keeps it bounded
// (conservative selection), Power/Linear let it diverge (consistent
// selection). The basic rate condition T^-2 lambda_T -> 0 restricts Power
// exponents to a < 2.
struct TuningRule {
  enum class Kind { Const, Power, Linear };

  Kind kind = Kind::Const;
  double value = 1.0;  // lambda0 for Const, exponent for Power; unused for Linear

  double lambda_at(double T) const {
    switch (kind) {
      case Kind::Const:
        return value;
      case Kind::Power:
        return std::pow(T, value);
      case Kind::Linear:
        return T;
    }
    return value;
  }

  // Exponent a in lambda_T ~ T^a; 0 for Const.
  double exponent() const {
    switch (kind) {
      case Kind::Const:
        return 0.0;
      case Kind::Power:
        return value;
      case Kind::Linear:
        return 1.0;
    }
    return 0.0;
  }

  bool diverges() const { return kind != Kind::Const; }

  // Filesystem-safe label used in cell names and output files.
  std::string name() const {
    char buf[64];
    switch (kind) {
      case Kind::Const:
        std::snprintf(buf, sizeof buf, "const%g", value);
        return buf;
      case Kind::Power:
        std::snprintf(buf, sizeof buf, "pow%g", value);
        return buf;
      case Kind::Linear:
        return "linear";
    }
    return "?";
  }

  void validate() const {
    if (kind == Kind::Const && !(value >= 0.0))
      throw ConfigError("const tuning rule needs lambda0 >= 0");
    if (kind == Kind::Power && !(value > 0.0 && value < 2.0))
      throw ConfigError("power tuning rule needs exponent in (0, 2)");
  }
};

}  // namespace alcoint
