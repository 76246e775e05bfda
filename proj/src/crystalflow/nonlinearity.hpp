// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <string>

#include "crystalflow/elliptic_solve.hpp"
#include "crystalflow/error.hpp"
#include "crystalflow/grid_ops.hpp"

namespace crystalflow {

enum class VariantKind { Sinh, Exp, ScaledSinh, Linear, PExponent };

// The outer nonlinearity f in  u_t = Delta f(w),  w = -Delta u  (or -Delta_p u
// for the p-exponent variant, which keeps f = sinh).
struct Variant {
  VariantKind kind = VariantKind::Sinh;
  double K = 1.0;           // scaled_sinh inverse temperature
  bool normalized = true;   // scaled_sinh: sinh(K s) / K instead of sinh(K s)
  double p = 2.0;           // p_exponent

  static Variant sinh() { return {}; }
  static Variant exp() { return {VariantKind::Exp}; }
  static Variant linear() { return {VariantKind::Linear}; }
  static Variant scaled_sinh(double K, bool normalized = true) {
    return {VariantKind::ScaledSinh, K, normalized};
  }
  static Variant p_exponent(double p) {
    return {VariantKind::PExponent, 1.0, true, p};
  }

  bool operator==(const Variant&) const = default;

  bool uses_p_laplacian() const { return kind == VariantKind::PExponent; }

  std::string name() const {
    switch (kind) {
      case VariantKind::Sinh: return "sinh";
      case VariantKind::Exp: return "exp";
      case VariantKind::Linear: return "linear";
      case VariantKind::ScaledSinh: return "scaled_sinh";
      case VariantKind::PExponent: return "p_exponent";
    }
    return "?";
  }

  // Argument passed to the exponential; this is what the overflow cap bounds.
  double exponent_argument(double s) const {
    return kind == VariantKind::ScaledSinh ? K * s : s;
  }

  double f(double s) const {
    switch (kind) {
      case VariantKind::Exp: return std::exp(s);
      case VariantKind::Linear: return s;
      case VariantKind::ScaledSinh:
        return normalized ? std::sinh(K * s) / K : std::sinh(K * s);
      default: return std::sinh(s);
    }
  }

  double df(double s) const {
    switch (kind) {
      case VariantKind::Exp: return std::exp(s);
      case VariantKind::Linear: return 1.0;
      case VariantKind::ScaledSinh:
        return normalized ? std::cosh(K * s) : K * std::cosh(K * s);
      default: return std::cosh(s);
    }
  }

  // F with F' = f; reduces to cosh for sinh.
  double antiderivative(double s) const {
    switch (kind) {
      case VariantKind::Exp: return std::exp(s);
      case VariantKind::Linear: return 1.0 + 0.5 * s * s;
      case VariantKind::ScaledSinh:
        return normalized ? std::cosh(K * s) / (K * K) : std::cosh(K * s) / K;
      default: return std::cosh(s);
    }
  }

  CoefficientBound coefficient_bound() const {
    if (kind == VariantKind::Exp ||
        (kind == VariantKind::ScaledSinh && !normalized)) {
      return CoefficientBound::Positive;
    }
    return CoefficientBound::AtLeastOne;
  }

  void validate() const {
    if (kind == VariantKind::ScaledSinh && !(K > 0.0)) {
      fail(ErrorCode::InvalidArgument, "scaled_sinh requires K > 0");
    }
    if (kind == VariantKind::PExponent && !(p >= 2.0)) {
      fail(ErrorCode::InvalidExponent, "p_exponent requires p >= 2");
    }
  }
};

// Throws an overflow error when any exponent argument exceeds the cap.
inline void check_exponent_cap(const Field& w, const Variant& v, double cap,
                               const char* where) {
  for (double s : w.values()) {
    const double arg = v.exponent_argument(s);
    if (!std::isfinite(arg) || std::abs(arg) > cap) {
      fail(ErrorCode::Overflow,
           std::string(where) + ": exponent argument " + format_real(arg) +
               " exceeds cap " + format_real(cap) +
               "; reduce the time step tau or the initial amplitude");
    }
  }
}

inline Field apply_f(const Field& w, const Variant& v) {
  return map(w, [&v](double s) { return v.f(s); });
}
inline Field apply_df(const Field& w, const Variant& v) {
  return map(w, [&v](double s) { return v.df(s); });
}

}  // namespace crystalflow
