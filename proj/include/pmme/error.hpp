// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace pmme {

enum class ErrorKind {
  DimensionMismatch,
  InfiniteDivergence,
  Unreconstructable,
  NonConvergence,
  ModeUnexcited,
  NoKernelInformation,
  RankDeficient,
  MissingSettings,
  UnphysicalInput,
  GridMismatch,
  DimensionCap,
  NotProductState,
  InvalidArgument,
  InvalidConfig,
  NonFiniteLoss,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double residual = 0.0)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        residual_(residual) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Only meaningful for NonConvergence.
  double residual() const noexcept { return residual_; }

 private:
  ErrorKind kind_;
  double residual_;
};

}  // namespace pmme
