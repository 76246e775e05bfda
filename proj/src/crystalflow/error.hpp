// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace crystalflow {

enum class ErrorCode {
  InvalidArgument,
  UnsupportedDimension,
  InvalidExponent,
  InvalidCoefficient,
  SolverFailure,
  StepFailure,
  Overflow,
  Config,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Time-step index the failure belongs to, or -1 when not step related.
  int step() const noexcept { return step_; }
  void set_step(int k) noexcept { step_ = k; }

  // Residual trail of the failing iteration (empty for non-iterative errors).
  const std::vector<double>& residuals() const noexcept { return residuals_; }
  void set_residuals(std::vector<double> r) { residuals_ = std::move(r); }

 private:
  ErrorCode code_;
  int step_ = -1;
  std::vector<double> residuals_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace crystalflow
