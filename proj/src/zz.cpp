// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "pmme/zz.hpp"

#include <cmath>
#include <ostream>

namespace pmme {

namespace {

void require_nonneg(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x) || x < 0.0) throw Error(ErrorKind::InvalidArgument, what);
}

}  // namespace

void ZZModel::validate() const {
  if (J.size() != n_spectators)
    throw Error(ErrorKind::InvalidArgument, "ZZ model needs one coupling per spectator");
  if (gamma_down.size() != n_spectators + 1 || gamma_phi.size() != n_spectators + 1)
    throw Error(ErrorKind::InvalidArgument, "ZZ model needs N+1 dissipation rates");
  if (!std::isfinite(omega_0)) throw Error(ErrorKind::InvalidArgument, "omega_0 must be finite");
  for (double j : J)
    if (!std::isfinite(j)) throw Error(ErrorKind::InvalidArgument, "couplings must be finite");
  require_nonneg(gamma_down, "gamma_down must be non-negative");
  require_nonneg(gamma_phi, "gamma_phi must be non-negative");
}

double ZZModel::gamma_main() const { return 2.0 * gamma_phi.at(0) + 0.5 * gamma_down.at(0); }

double ZZModel::gamma_spectator(std::size_t q) const {
  if (q == 0 || q > n_spectators) throw Error(ErrorKind::InvalidArgument, "spectator index");
  return gamma_down.at(q);
}

double ZZModel::max_rate() const {
  double r = std::abs(omega_0);
  for (double j : J) r += std::abs(j);
  for (std::size_t q = 0; q <= n_spectators; ++q) r += gamma_down.at(q) + 2.0 * gamma_phi.at(q);
  return r;
}

json ZZModel::to_json() const {
  return {{"n_spectators", n_spectators}, {"omega_0", omega_0}, {"J", J},
          {"gamma_down", gamma_down},     {"gamma_phi", gamma_phi}};
}

ZZModel ZZModel::from_json(const json& j) {
  ZZModel m;
  try {
    m.n_spectators = j.at("n_spectators").get<std::size_t>();
    m.omega_0 = j.value("omega_0", 0.0);
    m.J = j.at("J").get<std::vector<double>>();
    m.gamma_down = j.at("gamma_down").get<std::vector<double>>();
    m.gamma_phi = j.at("gamma_phi").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("ZZ model: ") + e.what());
  }
  m.validate();
  return m;
}

Bloch bloch_of(const Mat& rho) {
  if (rho.rows() != 2 || rho.cols() != 2)
    throw Error(ErrorKind::DimensionMismatch, "bloch_of expects a qubit state");
  return {2.0 * rho(1, 0).real(), 2.0 * rho(1, 0).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

ProductState ProductState::from_angles(const std::vector<std::pair<double, double>>& angles) {
  ProductState s;
  for (auto [theta, phi] : angles)
    s.qubits.push_back({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                        std::cos(theta)});
  return s;
}

Mat ProductState::density() const {
  if (qubits.empty()) throw Error(ErrorKind::InvalidArgument, "empty product state");
  Mat rho = Mat::Ones(1, 1);
  for (const auto& b : qubits) {
    if (b.x * b.x + b.y * b.y + b.z * b.z > 1.0 + 1e-9)
      throw Error(ErrorKind::UnphysicalInput, "Bloch vector longer than 1");
    rho = kron(rho, states::from_bloch(b.x, b.y, b.z));
  }
  return rho;
}

ProductState product_state_from_density(const Mat& rho, std::size_t n_qubits, double tol) {
  ProductState s;
  for (std::size_t q = 0; q < n_qubits; ++q) s.qubits.push_back(bloch_of(reduce_qubits(rho, n_qubits, {q})));
  if ((s.density() - rho).norm() > tol)
    throw Error(ErrorKind::NotProductState, "initial state does not factorize over qubits");
  return s;
}

void BlochTrajectory::push(double time, const Bloch& b) {
  t.push_back(time);
  vx.push_back(b.x);
  vy.push_back(b.y);
  vz.push_back(b.z);
  purity.push_back(0.5 * (1.0 + b.x * b.x + b.y * b.y + b.z * b.z));
}

void write_trajectory_csv(std::ostream& os, const BlochTrajectory& traj) {
  os << "t,vx,vy,vz,purity\n";
  for (std::size_t n = 0; n < traj.size(); ++n)
    os << fmt_num(traj.t[n]) << ',' << fmt_num(traj.vx[n]) << ',' << fmt_num(traj.vy[n]) << ','
       << fmt_num(traj.vz[n]) << ',' << fmt_num(traj.purity[n]) << '\n';
}

Eigen::Matrix2cd block_propagator(double gamma, double J, double t, int sign) {
  if (t < 0.0) throw Error(ErrorKind::InvalidArgument, "block_propagator: negative time");
  const double s = sign >= 0 ? 1.0 : -1.0;
  const cplx off = -s * kI * J;
  Eigen::Matrix2cd b;
  b << 0.5 * gamma, off, off + gamma, -0.5 * gamma;
  const cplx omega = 0.5 * gamma + off;
  const cplx z = omega * t;
  cplx c;
  cplx s_over_omega;  // sinh(Omega t) / Omega
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    c = 1.0 + z2 / 2.0 + z2 * z2 / 24.0;
    s_over_omega = t * (1.0 + z2 / 6.0 + z2 * z2 / 120.0);
  } else {
    c = std::cosh(z);
    s_over_omega = std::sinh(z) / omega;
  }
  return c * Eigen::Matrix2cd::Identity() + s_over_omega * b;
}

BlochTrajectory closed_form_bloch(const ZZModel& model, const ProductState& init,
                                  const std::vector<double>& times) {
  model.validate();
  if (init.n_qubits() != model.n_spectators + 1)
    throw Error(ErrorKind::DimensionMismatch, "initial state must cover main + spectators");
  const Bloch& b0 = init.qubits.front();
  const double g0 = model.gamma_main();

  BlochTrajectory out;
  for (double t : times) {
    cplx sp = std::exp(cplx(-g0, model.omega_0) * t) * cplx(b0.x, -b0.y) / 2.0;
    for (std::size_t q = 1; q <= model.n_spectators; ++q) {
      const double gq = model.gamma_spectator(q);
      const auto e = block_propagator(gq, model.J[q - 1], t, +1);
      sp *= std::exp(-0.5 * gq * t) * (e(0, 0) + init.qubits[q].z * e(0, 1));
    }
    const double vz = 1.0 + (b0.z - 1.0) * std::exp(-model.gamma_down[0] * t);
    out.push(t, {2.0 * sp.real(), -2.0 * sp.imag(), vz});
  }
  return out;
}

namespace {

// Elementwise form of the ZZ Lindbladian: every term is diagonal in the
// computational basis except the amplitude-damping jump, which moves
// population along a single bit.
class ZZLindbladian {
 public:
  explicit ZZLindbladian(const ZZModel& m) : nq_(m.n_spectators + 1), dim_(Eigen::Index{1} << nq_) {
    const auto z = [&](Eigen::Index i, std::size_t q) {
      return ((i >> (nq_ - 1 - q)) & 1) ? -1.0 : 1.0;
    };
    Eigen::VectorXd h(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) {
      double e = -0.5 * m.omega_0 * z(i, 0);
      for (std::size_t q = 1; q < nq_; ++q) e += 0.5 * m.J[q - 1] * z(i, 0) * z(i, q);
      h(i) = e;
    }
    coeff_.resize(dim_, dim_);
    for (Eigen::Index j = 0; j < dim_; ++j)
      for (Eigen::Index i = 0; i < dim_; ++i) {
        double re = 0.0;
        for (std::size_t q = 0; q < nq_; ++q) {
          re += m.gamma_phi[q] * (z(i, q) * z(j, q) - 1.0);
          const double ni = z(i, q) < 0 ? 1.0 : 0.0;
          const double nj = z(j, q) < 0 ? 1.0 : 0.0;
          re -= 0.5 * m.gamma_down[q] * (ni + nj);
        }
        coeff_(i, j) = cplx(re, -(h(i) - h(j)));
      }
    gamma_down_ = m.gamma_down;
  }

  void apply(const Mat& rho, Mat& out) const {
    out = coeff_.cwiseProduct(rho);
    for (std::size_t q = 0; q < nq_; ++q) {
      const double g = gamma_down_[q];
      if (g == 0.0) continue;
      const Eigen::Index b = Eigen::Index{1} << (nq_ - 1 - q);
      for (Eigen::Index j = 0; j < dim_; ++j) {
        if (j & b) continue;
        for (Eigen::Index i = 0; i < dim_; ++i) {
          if (i & b) continue;
          out(i, j) += g * rho(i | b, j | b);
        }
      }
    }
  }

  Eigen::Index dim() const { return dim_; }

 private:
  std::size_t nq_;
  Eigen::Index dim_;
  Mat coeff_;
  std::vector<double> gamma_down_;
};

}  // namespace

BruteForceResult brute_force_evolve(const ZZModel& model, const Mat& init,
                                    const std::vector<double>& times, bool keep_states) {
  model.validate();
  if (model.n_spectators > kMaxBruteForceSpectators)
    throw Error(ErrorKind::DimensionCap, "brute force supports at most 6 spectators");
  const ZZLindbladian lind(model);
  if (init.rows() != lind.dim() || init.cols() != lind.dim())
    throw Error(ErrorKind::DimensionMismatch, "initial state must be 2^(N+1) square");

  const double rate = model.max_rate();
  const double h_max = rate > 0.0 ? 0.01 / rate : 1.0;
  const std::size_t nq = model.n_spectators + 1;

  BruteForceResult res;
  Mat rho = init;
  Mat k1, k2, k3, k4, tmp;
  double now = 0.0;
  for (double target : times) {
    if (target < now) throw Error(ErrorKind::InvalidArgument, "times must be non-decreasing and >= 0");
    const double span = target - now;
    const auto steps = static_cast<std::size_t>(std::ceil(span / h_max - 1e-12));
    if (steps > 0) {
      const double h = span / static_cast<double>(steps);
      for (std::size_t s = 0; s < steps; ++s) {
        lind.apply(rho, k1);
        tmp = rho + (0.5 * h) * k1;
        lind.apply(tmp, k2);
        tmp = rho + (0.5 * h) * k2;
        lind.apply(tmp, k3);
        tmp = rho + h * k3;
        lind.apply(tmp, k4);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    now = target;
    res.max_trace_error = std::max(res.max_trace_error, std::abs(rho.trace() - cplx(1.0)));
    res.main.push(target, bloch_of(reduce_qubits(rho, nq, {0})));
    if (keep_states) res.states.push_back(rho);
  }
  return res;
}

std::vector<double> uniform_grid(std::size_t n, double dt) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) * dt;
  return t;
}

}  // namespace pmme
