// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "pmme/kernel.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include <unsupported/Eigen/FFT>

#include "pmme/io.hpp"

namespace pmme {

LaplaceGrid LaplaceGrid::make(std::size_t n, double dt, double sigma) {
  if (n < 8) throw Error(ErrorKind::InvalidArgument, "Laplace grid needs at least 8 samples");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  LaplaceGrid g{n, dt, sigma};
  if (!(sigma > 0.0)) g.sigma = 1.0 / (3.0 * g.t_max());
  return g;
}

double LaplaceGrid::omega(std::size_t k) const {
  const auto kk = static_cast<double>(k);
  const auto nn = static_cast<double>(n);
  const double signed_k = k < (n + 1) / 2 ? kk : kk - nn;
  return 2.0 * std::numbers::pi * signed_k / (nn * dt);
}

std::vector<cplx> LaplaceGrid::s_values() const {
  std::vector<cplx> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = this->s(k);
  return s;
}

std::vector<cplx> laplace_forward(const std::vector<cplx>& f, const LaplaceGrid& grid) {
  if (f.size() != grid.n) throw Error(ErrorKind::GridMismatch, "sample count differs from grid");
  std::vector<cplx> damped(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) damped[i] = f[i] * std::exp(-grid.sigma * grid.time(i));
  Eigen::FFT<double> fft;
  std::vector<cplx> out;
  fft.fwd(out, damped);
  for (auto& v : out) v *= grid.dt;
  return out;
}

std::vector<cplx> laplace_inverse(const std::vector<cplx>& values, const LaplaceGrid& grid) {
  if (values.size() != grid.n) throw Error(ErrorKind::GridMismatch, "value count differs from grid");
  Eigen::FFT<double> fft;
  std::vector<cplx> out;
  fft.inv(out, values);  // includes the 1/N
  for (std::size_t i = 0; i < grid.n; ++i) out[i] *= std::exp(grid.sigma * grid.time(i)) / grid.dt;
  return out;
}

namespace {

std::vector<bool> small_magnitude_mask(const std::vector<cplx>& xi_tilde, double cutoff_rel) {
  double peak = 0.0;
  for (const auto& v : xi_tilde) peak = std::max(peak, std::abs(v));
  std::vector<bool> mask(xi_tilde.size());
  for (std::size_t k = 0; k < xi_tilde.size(); ++k)
    mask[k] = !(std::abs(xi_tilde[k]) >= cutoff_rel * peak) || peak == 0.0;
  return mask;
}

void require_kernel_mode(cplx lambda1) {
  if (std::abs(lambda1) == 0.0)
    throw Error(ErrorKind::NoKernelInformation, "lambda1 = 0 for this mode");
}

// Fills masked entries by linear interpolation between the nearest unmasked
// neighbours, walking the grid circularly.
void fill_masked(std::vector<cplx>& v, const std::vector<bool>& mask) {
  const std::size_t n = v.size();
  std::size_t good = 0;
  for (bool m : mask) good += m ? 0 : 1;
  if (good == 0) throw Error(ErrorKind::Unreconstructable, "every grid point is masked");
  if (good == n) return;
  for (std::size_t k = 0; k < n; ++k) {
    if (!mask[k]) continue;
    std::size_t left = 1;
    while (mask[(k + n - left) % n]) ++left;
    std::size_t right = 1;
    while (mask[(k + right) % n]) ++right;
    const double w = static_cast<double>(left) / static_cast<double>(left + right);
    v[k] = (1.0 - w) * v[(k + n - left) % n] + w * v[(k + right) % n];
  }
}

}  // namespace

SDomainKernel kernel_sdomain(const std::vector<cplx>& xi_tilde, const std::vector<cplx>& s,
                             cplx lambda0, cplx lambda1, double cutoff_rel) {
  require_kernel_mode(lambda1);
  if (xi_tilde.size() != s.size()) throw Error(ErrorKind::GridMismatch, "xi~ and s differ in length");
  SDomainKernel out;
  out.masked = small_magnitude_mask(xi_tilde, cutoff_rel);
  out.values.resize(s.size());
  for (std::size_t k = 0; k < s.size(); ++k)
    out.values[k] = out.masked[k] ? cplx(0.0) : (s[k] - lambda0 - 1.0 / xi_tilde[k]) / lambda1;
  return out;
}

ModeKernel reconstruct_mode_kernel(const std::vector<cplx>& xi, std::size_t mode,
                                   const DampingBasis& basis, const LaplaceGrid& grid,
                                   const KernelOptions& options) {
  ModeKernel mk;
  mk.mode = mode;
  mk.lambda = basis.lambda(mode);
  mk.lambda0 = basis.lambda0(mode);
  mk.lambda1 = basis.lambda1(mode);
  require_kernel_mode(mk.lambda1);
  if (xi.size() != grid.n) throw Error(ErrorKind::GridMismatch, "series length differs from grid");

  std::vector<cplx> data = xi;
  if (options.hann) {
    const double last = static_cast<double>(grid.n - 1);
    for (std::size_t i = 0; i < grid.n; ++i)
      data[i] *= 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(i) / last));
  }

  const std::vector<cplx> xi_tilde = laplace_forward(data, grid);
  const std::vector<cplx> s = grid.s_values();
  SDomainKernel sk = kernel_sdomain(xi_tilde, s, mk.lambda0, mk.lambda1, options.cutoff_rel);
  if (options.evaluation == SEvaluation::Matched) {
    for (std::size_t k = 0; k < grid.n; ++k) {
      if (sk.masked[k]) continue;
      const cplx rate = std::log(std::exp(s[k] * grid.dt) * (1.0 - grid.dt / xi_tilde[k])) / grid.dt;
      sk.values[k] = (rate - mk.lambda0) / mk.lambda1;
    }
  }
  fill_masked(sk.values, sk.masked);
  mk.masked = sk.masked;
  mk.k_tilde = sk.values;

  mk.k = laplace_inverse(sk.values, grid);
  for (std::size_t i = 0; i < grid.n; ++i) mk.k[i] *= std::exp(-mk.lambda * grid.time(i));
  return mk;
}

const ModeKernel* KernelEstimate::find(std::size_t mode) const {
  for (const auto& m : modes)
    if (m.mode == mode) return &m;
  return nullptr;
}

KernelEstimate reconstruct_kernel(const CoefficientSeries& coeffs, const DampingBasis& basis,
                                  const LaplaceGrid& grid, const KernelOptions& options) {
  if (coeffs.times.size() != grid.n) throw Error(ErrorKind::GridMismatch, "series length differs from grid");
  for (std::size_t i = 0; i < grid.n; ++i)
    if (std::abs(coeffs.times[i] - grid.time(i)) > 1e-9 * std::max(1.0, grid.t_max()))
      throw Error(ErrorKind::GridMismatch, "series times are not the uniform grid");

  KernelEstimate est;
  est.grid = grid;
  for (std::size_t mode : {std::size_t{2}, std::size_t{3}}) {
    if (!coeffs.excited(mode) || basis.lambda1(mode) == cplx(0.0)) continue;
    est.modes.push_back(reconstruct_mode_kernel(coeffs.xi(mode), mode, basis, grid, options));
  }
  if (est.modes.empty())
    throw Error(ErrorKind::NoKernelInformation, "no excited kernel-bearing mode (2 or 3)");

  const auto trusted = static_cast<std::size_t>(
      std::floor((1.0 - options.low_confidence_fraction) * static_cast<double>(grid.n)));
  est.low_confidence.resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) est.low_confidence[i] = i >= trusted;
  return est;
}

Mat apply_lifted_kernel(const DampingBasis& basis, const std::array<cplx, 4>& k, const Mat& x) {
  Mat out = Mat::Zero(2, 2);
  for (std::size_t i = 0; i < 4; ++i) out += k[i] * (basis.left()[i] * x).trace() * basis.right()[i];
  return out;
}

SuperoperatorMatrix lifted_kernel_superop(const DampingBasis& basis, const std::array<cplx, 4>& k) {
  Mat s = Mat::Zero(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    s += k[i] * vectorize(basis.right()[i]) * vectorize(basis.left()[i].transpose()).transpose();
  return {s};
}

std::vector<cplx> integrate_pmme_mode(cplx lambda0, cplx lambda1, cplx lambda,
                                      const std::vector<cplx>& k, double dt, cplx xi0) {
  const std::size_t n = k.size();
  std::vector<cplx> h(n);
  for (std::size_t m = 0; m < n; ++m) h[m] = std::exp(lambda * dt * static_cast<double>(m)) * k[m];

  std::vector<cplx> xi(n);
  if (n == 0) return xi;
  xi[0] = xi0;
  // F_n = lambda0 xi_n + lambda1 C_n with
  //   C_n = dt [h_0 xi_n + sum_{m=1}^{n-1} h_m xi_{n-m} + h_n xi_0 / 2]
  auto history = [&](std::size_t step) {  // C_step without the h_0 xi_step term
    cplx acc = 0.0;
    for (std::size_t m = 1; m < step; ++m) acc += h[m] * xi[step - m];
    if (step > 0) acc += 0.5 * h[step] * xi[0];
    return dt * acc;
  };
  const cplx self = lambda0 + lambda1 * dt * h[0];
  cplx f_prev = self * xi[0] + lambda1 * history(0);
  for (std::size_t step = 1; step < n; ++step) {
    const cplx rest = lambda1 * history(step);
    xi[step] = (xi[step - 1] + 0.5 * dt * (f_prev + rest)) / (1.0 - 0.5 * dt * self);
    f_prev = self * xi[step] + rest;
  }
  return xi;
}

double dominant_frequency(const std::vector<cplx>& samples, double dt, std::size_t first,
                          std::size_t last, std::size_t min_pad) {
  if (last > samples.size() || last <= first + 2)
    throw Error(ErrorKind::InvalidArgument, "frequency window needs at least three samples");
  const std::size_t len = last - first;
  std::size_t m = 1;
  while (m < std::max(min_pad, 4 * len)) m <<= 1;

  std::vector<cplx> buf(m, cplx(0.0));
  for (std::size_t j = 0; j < len; ++j) {
    const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(j) /
                                           static_cast<double>(len - 1)));
    buf[j] = w * samples[first + j];
  }
  Eigen::FFT<double> fft;
  std::vector<cplx> spec;
  fft.fwd(spec, buf);

  std::size_t best = 0;
  for (std::size_t i = 1; i < m; ++i)
    if (std::abs(spec[i]) > std::abs(spec[best])) best = i;
  const double a = std::abs(spec[(best + m - 1) % m]);
  const double b = std::abs(spec[best]);
  const double c = std::abs(spec[(best + 1) % m]);
  const double denom = a - 2.0 * b + c;
  const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;

  double bin = static_cast<double>(best) + shift;
  if (bin >= static_cast<double>(m) / 2.0) bin -= static_cast<double>(m);
  return 2.0 * std::numbers::pi * bin / (static_cast<double>(m) * dt);
}

void write_kernel_csv(std::ostream& os, const KernelEstimate& est) {
  const ModeKernel* k2 = est.find(2);
  const ModeKernel* k3 = est.find(3);
  const std::string nan = "nan";
  os << "t,re_k2,im_k2,re_k3,im_k3,confidence_flag\n";
  for (std::size_t i = 0; i < est.grid.n; ++i) {
    os << fmt_num(est.grid.time(i));
    for (const ModeKernel* mk : {k2, k3}) {
      if (mk) os << ',' << fmt_num(mk->k[i].real()) << ',' << fmt_num(mk->k[i].imag());
      else os << ',' << nan << ',' << nan;
    }
    os << ',' << (est.low_confidence[i] ? 0 : 1) << '\n';
  }
}

}  // namespace pmme
