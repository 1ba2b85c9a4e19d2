// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Markovian envelope: least-squares fit of (omega_z, gamma_ad, gamma_pd) to a
// Bloch trajectory. Optimization runs in theta = (omega_z, log gamma_ad, log gamma_pd).

#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "pmme/io.hpp"
#include "pmme/lindblad.hpp"
#include "pmme/zz.hpp"

namespace pmme {

// Lindblad prediction from `initial` at t_0 = times.front().
BlochTrajectory lindblad_trajectory(const LindbladParams& p, const Bloch& initial,
                                    const std::vector<double>& times);

// (1/3N) sum over x,y,z and samples of squared deviations. The initial state
// defaults to the first data sample.
double mse_loss(const LindbladParams& p, const BlochTrajectory& data,
                std::optional<Bloch> initial = std::nullopt);

using Theta = std::array<double, 3>;
LindbladParams params_from_theta(const Theta& theta);
Theta theta_from_params(const LindbladParams& p);

// Central differences with step rel_step * max(1, |theta_i|).
Theta loss_gradient(const Theta& theta, const BlochTrajectory& data, const Bloch& initial,
                    double rel_step = 1e-6);

struct FitOptions {
  std::size_t max_iter = 10000;
  double rel_tol = 1e-10;
  std::size_t n_starts = 5;  // first start is the guess itself
  std::uint64_t seed = 20260101;
  double jitter = 0.3;
  double fd_rel_step = 1e-6;
  std::optional<Bloch> initial;  // known preparation; else first data sample
};

struct FitResult {
  LindbladParams params;
  double mse = 0.0;
  double initial_mse = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::array<double, 3> sensitivity{};  // d^2 MSE / dp^2 per natural parameter

  json to_json() const;
};

// Throws NonFiniteLoss if the loss cannot be evaluated at the guess.
FitResult fit_parameters(const BlochTrajectory& data, const LindbladParams& guess,
                         const FitOptions& options = {});

}  // namespace pmme
