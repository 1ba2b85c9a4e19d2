// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Single-qubit Lindblad generator
//   L(rho) = (i w/2)[Z, rho] + g_ad D[sigma_-](rho) + g_pd (Z rho Z - rho)
// split as L0 (precession + amplitude damping) and L1 (pure dephasing), and its
// damping basis. Ground state is |0> (Z = +1).

#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "pmme/core.hpp"

namespace pmme {

struct LindbladParams {
  double omega_z = 0.0;   // rad/us
  double gamma_ad = 0.0;  // 1/us
  double gamma_pd = 0.0;  // 1/us

  void validate() const;
};

struct LindbladGenerator {
  SuperoperatorMatrix full;
  SuperoperatorMatrix l0;
  SuperoperatorMatrix l1;
};

LindbladGenerator build_generator(const LindbladParams& p);

class DampingBasis {
 public:
  explicit DampingBasis(const LindbladParams& p);

  const LindbladParams& params() const { return p_; }
  const std::array<Mat, 4>& right() const { return right_; }
  const std::array<Mat, 4>& left() const { return left_; }
  cplx lambda(std::size_t i) const { return lambda_.at(i); }
  cplx lambda0(std::size_t i) const { return lambda0_.at(i); }
  cplx lambda1(std::size_t i) const { return lambda1_.at(i); }

  // mu_i = Tr(L_i rho)
  std::array<cplx, 4> coefficients(const Mat& rho) const;
  Mat reconstruct(const std::array<cplx, 4>& mu) const;

 private:
  LindbladParams p_;
  std::array<Mat, 4> right_;
  std::array<Mat, 4> left_;
  std::array<cplx, 4> lambda_;
  std::array<cplx, 4> lambda0_;
  std::array<cplx, 4> lambda1_;
};

DampingBasis damping_basis(const LindbladParams& p);

// e^{Lt} rho0 evaluated through the damping basis.
Mat propagate(const LindbladParams& p, const Mat& rho0, double t);
Mat propagate(const DampingBasis& basis, const Mat& rho0, double t);

inline constexpr double kUnexcitedThreshold = 1e-8;

struct CoefficientSeries {
  std::vector<double> times;
  std::vector<std::array<cplx, 4>> mu;

  // xi_i(t_n) = mu_i(t_n) / mu_i(0); throws ModeUnexcited for |mu_i(0)| <= 1e-8.
  std::vector<cplx> xi(std::size_t mode) const;
  bool excited(std::size_t mode) const;
};

CoefficientSeries expand_coefficients(const DampingBasis& basis,
                                      const std::vector<double>& times,
                                      const std::vector<Mat>& rho_series);
Mat reconstruct_state(const DampingBasis& basis, const std::array<cplx, 4>& mu);

// Columns: t, re_mu0, im_mu0, ..., re_mu3, im_mu3.
void write_coefficients_csv(std::ostream& os, const CoefficientSeries& series);

}  // namespace pmme
