// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Memory-kernel extraction for the scalar damping-basis modes
//   mu_i'(t) = lambda0_i mu_i(t) + lambda1_i int_0^t e^{lambda_i tau} k(tau) mu_i(t - tau) dtau,
// whose Laplace transform gives k~(s - lambda_i) = (s - lambda0_i - 1/xi~_i(s)) / lambda1_i.

#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "pmme/core.hpp"
#include "pmme/lindblad.hpp"

namespace pmme {

// Damped DFT grid. Frequencies follow FFT storage order; bins k >= N/2 carry
// the negative frequencies 2 pi (k - N) / (N dt).
struct LaplaceGrid {
  std::size_t n = 0;
  double dt = 0.0;
  double sigma = 0.0;

  // sigma <= 0 selects the default 1 / (3 T_max).
  static LaplaceGrid make(std::size_t n, double dt, double sigma = 0.0);

  double t_max() const { return static_cast<double>(n - 1) * dt; }
  double time(std::size_t i) const { return static_cast<double>(i) * dt; }
  double omega(std::size_t k) const;
  cplx s(std::size_t k) const { return {sigma, omega(k)}; }
  std::vector<cplx> s_values() const;
};

// dt * sum_n f(t_n) e^{-s_k t_n}
std::vector<cplx> laplace_forward(const std::vector<cplx>& f, const LaplaceGrid& grid);
// e^{sigma t_n} / (N dt) * sum_k F_k e^{i omega_k t_n}; exact inverse of laplace_forward.
std::vector<cplx> laplace_inverse(const std::vector<cplx>& values, const LaplaceGrid& grid);

struct SDomainKernel {
  std::vector<cplx> values;  // k~ at the shifted argument, one per grid point
  std::vector<bool> masked;  // |xi~| below the cutoff
};

// Pointwise (s - lambda0 - 1/xi~(s)) / lambda1. Throws NoKernelInformation for lambda1 = 0.
SDomainKernel kernel_sdomain(const std::vector<cplx>& xi_tilde, const std::vector<cplx>& s,
                             cplx lambda0, cplx lambda1, double cutoff_rel = 1e-6);

// How s - 1/xi~(s) is evaluated on sampled data.
//   Literal: as written, with xi~ the Riemann sum.
//   Matched: Log(e^{s dt} (1 - dt / xi~(s))) / dt, which reproduces lambda
//            exactly for sampled exponentials and tends to Literal as dt -> 0.
enum class SEvaluation { Literal, Matched };

struct KernelOptions {
  SEvaluation evaluation = SEvaluation::Matched;
  bool hann = false;  // taper xi(t) with a half-Hann window before transforming
  double cutoff_rel = 1e-6;
  double low_confidence_fraction = 0.2;
};

struct ModeKernel {
  std::size_t mode = 0;
  cplx lambda;
  cplx lambda0;
  cplx lambda1;
  std::vector<cplx> k;        // k(t_n); sample 0 holds half the t = 0+ value plus any delta mass / dt
  std::vector<cplx> k_tilde;  // k~(s_k - lambda) on the grid, masked points interpolated
  std::vector<bool> masked;
};

struct KernelEstimate {
  LaplaceGrid grid;
  std::vector<ModeKernel> modes;
  std::vector<bool> low_confidence;

  const ModeKernel* find(std::size_t mode) const;
};

// Reconstructs modes 2 and 3 where excited. Throws NoKernelInformation when
// neither is available.
KernelEstimate reconstruct_kernel(const CoefficientSeries& coeffs, const DampingBasis& basis,
                                  const LaplaceGrid& grid, const KernelOptions& options = {});

// Single-mode reconstruction from a normalized series xi(t_n).
ModeKernel reconstruct_mode_kernel(const std::vector<cplx>& xi, std::size_t mode,
                                   const DampingBasis& basis, const LaplaceGrid& grid,
                                   const KernelOptions& options = {});

// k(tau) X = sum_i k_i R_i Tr(L_i X)
Mat apply_lifted_kernel(const DampingBasis& basis, const std::array<cplx, 4>& k, const Mat& x);
SuperoperatorMatrix lifted_kernel_superop(const DampingBasis& basis, const std::array<cplx, 4>& k);

// Implicit-trapezoid solution of the scalar-mode equation above on the kernel's
// own grid. The convolution is trapezoidal in tau with the tau = 0 end weighted
// so that sample 0 of a reconstructed kernel (which stores half the jump)
// contributes correctly.
std::vector<cplx> integrate_pmme_mode(cplx lambda0, cplx lambda1, cplx lambda,
                                      const std::vector<cplx>& k, double dt, cplx xi0 = 1.0);

// Signed angular frequency (rad/us) of the largest peak in the Hann-windowed,
// zero-padded spectrum of samples [first, last).
double dominant_frequency(const std::vector<cplx>& samples, double dt, std::size_t first,
                          std::size_t last, std::size_t min_pad = 4096);

// Columns: t, re_k2, im_k2, re_k3, im_k3, confidence_flag (1 trusted, 0 flagged).
void write_kernel_csv(std::ostream& os, const KernelEstimate& est);

}  // namespace pmme
