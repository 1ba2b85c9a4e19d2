// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "pmme/lindblad.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "pmme/io.hpp"

namespace pmme {

void LindbladParams::validate() const {
  if (!std::isfinite(omega_z) || !std::isfinite(gamma_ad) || !std::isfinite(gamma_pd))
    throw Error(ErrorKind::InvalidArgument, "Lindblad parameters must be finite");
  if (gamma_ad < 0.0 || gamma_pd < 0.0)
    throw Error(ErrorKind::InvalidArgument, "Lindblad rates must be non-negative");
}

namespace {

using MapFn = Mat (*)(const LindbladParams&, const Mat&);

Mat apply_l0(const LindbladParams& p, const Mat& rho) {
  const Mat z = pauli::Z();
  const Mat sm = pauli::sigma_minus();
  const Mat sp = pauli::sigma_plus();
  const Mat n = sp * sm;
  return 0.5 * kI * p.omega_z * (z * rho - rho * z) +
         p.gamma_ad * (sm * rho * sp - 0.5 * (n * rho + rho * n));
}

Mat apply_l1(const LindbladParams& p, const Mat& rho) {
  const Mat z = pauli::Z();
  return p.gamma_pd * (z * rho * z - rho);
}

// Superoperator matrix by acting on the matrix units |i><j|.
SuperoperatorMatrix superop_of(const LindbladParams& p, MapFn f) {
  Mat s(4, 4);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) {
      Mat e = Mat::Zero(2, 2);
      e(i, j) = 1.0;
      s.col(i + 2 * j) = vectorize(f(p, e));
    }
  return {s};
}

}  // namespace

LindbladGenerator build_generator(const LindbladParams& p) {
  p.validate();
  LindbladGenerator g;
  g.l0 = superop_of(p, apply_l0);
  g.l1 = superop_of(p, apply_l1);
  g.full = {g.l0.m + g.l1.m};
  return g;
}

DampingBasis::DampingBasis(const LindbladParams& p) : p_(p) {
  p.validate();
  const double r2 = 1.0 / std::numbers::sqrt2;
  const Mat id = pauli::I();
  const Mat z = pauli::Z();
  right_ = {r2 * (id + z), r2 * z, pauli::sigma_minus(), pauli::sigma_plus()};
  left_ = {r2 * id, r2 * (z - id), pauli::sigma_plus(), pauli::sigma_minus()};

  const double wz = p.omega_z;
  const double gad = p.gamma_ad;
  const double gpd = p.gamma_pd;
  lambda0_ = {cplx(0.0), cplx(-gad), cplx(-0.5 * gad, wz), cplx(-0.5 * gad, -wz)};
  lambda1_ = {cplx(0.0), cplx(0.0), cplx(-2.0 * gpd), cplx(-2.0 * gpd)};
  for (std::size_t i = 0; i < 4; ++i) lambda_[i] = lambda0_[i] + lambda1_[i];
}

std::array<cplx, 4> DampingBasis::coefficients(const Mat& rho) const {
  if (rho.rows() != 2 || rho.cols() != 2)
    throw Error(ErrorKind::DimensionMismatch, "damping basis expects a qubit state");
  std::array<cplx, 4> mu;
  for (std::size_t i = 0; i < 4; ++i) mu[i] = (left_[i] * rho).trace();
  return mu;
}

Mat DampingBasis::reconstruct(const std::array<cplx, 4>& mu) const {
  Mat rho = Mat::Zero(2, 2);
  for (std::size_t i = 0; i < 4; ++i) rho += mu[i] * right_[i];
  return rho;
}

DampingBasis damping_basis(const LindbladParams& p) { return DampingBasis(p); }

Mat propagate(const DampingBasis& basis, const Mat& rho0, double t) {
  if (t < 0.0) throw Error(ErrorKind::InvalidArgument, "propagate: negative time");
  auto mu = basis.coefficients(rho0);
  for (std::size_t i = 0; i < 4; ++i) mu[i] *= std::exp(basis.lambda(i) * t);
  return basis.reconstruct(mu);
}

Mat propagate(const LindbladParams& p, const Mat& rho0, double t) {
  return propagate(DampingBasis(p), rho0, t);
}

bool CoefficientSeries::excited(std::size_t mode) const {
  return !mu.empty() && std::abs(mu.front().at(mode)) > kUnexcitedThreshold;
}

std::vector<cplx> CoefficientSeries::xi(std::size_t mode) const {
  if (mode > 3) throw Error(ErrorKind::InvalidArgument, "mode index out of range");
  if (!excited(mode)) throw Error(ErrorKind::ModeUnexcited, "|mu_i(0)| <= 1e-8");
  const cplx m0 = mu.front()[mode];
  std::vector<cplx> out;
  out.reserve(mu.size());
  for (const auto& m : mu) out.push_back(m[mode] / m0);
  return out;
}

CoefficientSeries expand_coefficients(const DampingBasis& basis, const std::vector<double>& times,
                                      const std::vector<Mat>& rho_series) {
  if (times.size() != rho_series.size())
    throw Error(ErrorKind::GridMismatch, "times and states differ in length");
  CoefficientSeries s;
  s.times = times;
  s.mu.reserve(rho_series.size());
  for (const auto& rho : rho_series) s.mu.push_back(basis.coefficients(rho));
  return s;
}

Mat reconstruct_state(const DampingBasis& basis, const std::array<cplx, 4>& mu) {
  return basis.reconstruct(mu);
}

void write_coefficients_csv(std::ostream& os, const CoefficientSeries& series) {
  os << "t,re_mu0,im_mu0,re_mu1,im_mu1,re_mu2,im_mu2,re_mu3,im_mu3\n";
  for (std::size_t n = 0; n < series.times.size(); ++n) {
    os << fmt_num(series.times[n]);
    for (const auto& m : series.mu[n]) os << ',' << fmt_num(m.real()) << ',' << fmt_num(m.imag());
    os << '\n';
  }
}

}  // namespace pmme
