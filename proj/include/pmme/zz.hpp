// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Main qubit (index 0) coupled to N spectators through always-on ZZ terms:
//   H = -(w0/2) Z_0 + sum_q (J_q/2) Z_0 Z_q
// with local dissipators sum_q g_down_q D[sigma-_q] + g_phi_q D[Z_q], q = 0..N.
// Qubit 0 is the most significant factor of the 2^(N+1) Hilbert space.

#pragma once

#include <iosfwd>
#include <vector>

#include "pmme/core.hpp"
#include "pmme/io.hpp"

namespace pmme {

struct ZZModel {
  std::size_t n_spectators = 0;
  double omega_0 = 0.0;               // rad/us
  std::vector<double> J;              // rad/us, one per spectator
  std::vector<double> gamma_down;     // 1/us, q = 0..N
  std::vector<double> gamma_phi;      // 1/us, q = 0..N

  void validate() const;
  // Gamma_0 = 2 g_phi_0 + g_down_0 / 2
  double gamma_main() const;
  // Gamma_q = g_down_q for q >= 1
  double gamma_spectator(std::size_t q) const;
  // Upper bound on the generator's spectral radius.
  double max_rate() const;

  json to_json() const;
  static ZZModel from_json(const json& j);
};

struct Bloch {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;
};

Bloch bloch_of(const Mat& rho);

// Per-qubit Bloch vectors, main qubit first.
struct ProductState {
  std::vector<Bloch> qubits;

  // cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>
  static ProductState from_angles(const std::vector<std::pair<double, double>>& angles);
  std::size_t n_qubits() const { return qubits.size(); }
  Mat density() const;
};

// Factorizes rho over its qubits; throws NotProductState otherwise.
ProductState product_state_from_density(const Mat& rho, std::size_t n_qubits, double tol = 1e-9);

struct BlochTrajectory {
  std::vector<double> t;
  std::vector<double> vx;
  std::vector<double> vy;
  std::vector<double> vz;
  std::vector<double> purity;

  std::size_t size() const { return t.size(); }
  void push(double time, const Bloch& b);
};

void write_trajectory_csv(std::ostream& os, const BlochTrajectory& traj);

// e^{B t} for B = [[G/2, -/+ iJ], [-/+ iJ + G, -G/2]]; sign = +1 selects the upper signs.
Eigen::Matrix2cd block_propagator(double gamma, double J, double t, int sign = +1);

BlochTrajectory closed_form_bloch(const ZZModel& model, const ProductState& init,
                                  const std::vector<double>& times);

inline constexpr std::size_t kMaxBruteForceSpectators = 6;

struct BruteForceResult {
  BlochTrajectory main;
  std::vector<Mat> states;  // full 2^(N+1) states at each requested time
  double max_trace_error = 0.0;
};

// Fixed-step RK4 on the full Lindbladian, step <= 0.01 / max_rate.
BruteForceResult brute_force_evolve(const ZZModel& model, const Mat& init,
                                    const std::vector<double>& times, bool keep_states = false);

std::vector<double> uniform_grid(std::size_t n, double dt);

}  // namespace pmme
