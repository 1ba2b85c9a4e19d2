// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "pmme/fit.hpp"

#include <cmath>
#include <random>

namespace pmme {

BlochTrajectory lindblad_trajectory(const LindbladParams& p, const Bloch& initial,
                                    const std::vector<double>& times) {
  const DampingBasis basis(p);
  const cplx lambda2 = basis.lambda(2);
  const double lambda1 = basis.lambda(1).real();
  const cplx rho01(0.5 * initial.x, -0.5 * initial.y);
  BlochTrajectory out;
  const double t0 = times.empty() ? 0.0 : times.front();
  for (double t : times) {
    const double tau = t - t0;
    const cplx c = rho01 * std::exp(lambda2 * tau);
    out.push(t, {2.0 * c.real(), -2.0 * c.imag(), 1.0 + (initial.z - 1.0) * std::exp(lambda1 * tau)});
  }
  return out;
}

namespace {

Bloch first_sample(const BlochTrajectory& data) {
  if (data.size() == 0) throw Error(ErrorKind::GridMismatch, "empty trajectory");
  return {data.vx.front(), data.vy.front(), data.vz.front()};
}

double mse_impl(const LindbladParams& p, const BlochTrajectory& data, const Bloch& initial) {
  const BlochTrajectory model = lindblad_trajectory(p, initial, data.t);
  double acc = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n) {
    const double dx = data.vx[n] - model.vx[n];
    const double dy = data.vy[n] - model.vy[n];
    const double dz = data.vz[n] - model.vz[n];
    acc += dx * dx + dy * dy + dz * dz;
  }
  return acc / (3.0 * static_cast<double>(data.size()));
}

double loss_theta(const Theta& th, const BlochTrajectory& data, const Bloch& initial) {
  return mse_impl(params_from_theta(th), data, initial);
}

struct Run {
  Theta theta;
  double loss;
  std::size_t iterations;
  bool converged;
};

Run bfgs(Theta x, const BlochTrajectory& data, const Bloch& initial, const FitOptions& opt) {
  using V3 = Eigen::Vector3d;
  auto to_v = [](const Theta& t) { return V3(t[0], t[1], t[2]); };
  auto to_t = [](const V3& v) { return Theta{v(0), v(1), v(2)}; };

  double f = loss_theta(x, data, initial);
  V3 g = to_v(loss_gradient(x, data, initial, opt.fd_rel_step));
  Eigen::Matrix3d hinv = Eigen::Matrix3d::Identity();
  Run run{x, f, 0, false};

  for (std::size_t it = 1; it <= opt.max_iter; ++it) {
    run.iterations = it;
    if (g.norm() < 1e-300 || f < 1e-30) {
      run.converged = true;
      break;
    }
    V3 dir = -hinv * g;
    if (dir.dot(g) >= 0.0) {  // lost descent; restart from steepest descent
      hinv.setIdentity();
      dir = -g;
    }
    double step = 1.0;
    const double slope = dir.dot(g);
    V3 xv = to_v(x);
    double f_new = f;
    V3 x_new = xv;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = xv + step * dir;
      f_new = loss_theta(to_t(x_new), data, initial);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // no decrease along a descent direction: stationary to working precision
      run.converged = true;
      break;
    }
    const V3 g_new = to_v(loss_gradient(to_t(x_new), data, initial, opt.fd_rel_step));
    const V3 s = x_new - xv;
    const V3 y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
      hinv = (id - rho * s * y.transpose()) * hinv * (id - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    const double rel = std::abs(f - f_new) / std::max(std::abs(f), 1e-300);
    x = to_t(x_new);
    f = f_new;
    g = g_new;
    run.theta = x;
    run.loss = f;
    if (rel < opt.rel_tol) {
      run.converged = true;
      break;
    }
  }
  run.theta = x;
  run.loss = f;
  return run;
}

}  // namespace

double mse_loss(const LindbladParams& p, const BlochTrajectory& data, std::optional<Bloch> initial) {
  return mse_impl(p, data, initial ? *initial : first_sample(data));
}

LindbladParams params_from_theta(const Theta& theta) {
  return {theta[0], std::exp(theta[1]), std::exp(theta[2])};
}

Theta theta_from_params(const LindbladParams& p) {
  constexpr double floor = 1e-12;
  return {p.omega_z, std::log(std::max(p.gamma_ad, floor)), std::log(std::max(p.gamma_pd, floor))};
}

Theta loss_gradient(const Theta& theta, const BlochTrajectory& data, const Bloch& initial, double rel_step) {
  Theta g{};
  for (std::size_t i = 0; i < 3; ++i) {
    const double h = rel_step * std::max(1.0, std::abs(theta[i]));
    Theta up = theta;
    Theta dn = theta;
    up[i] += h;
    dn[i] -= h;
    g[i] = (loss_theta(up, data, initial) - loss_theta(dn, data, initial)) / (2.0 * h);
  }
  return g;
}

json FitResult::to_json() const {
  return {{"omega_z", params.omega_z}, {"gamma_ad", params.gamma_ad}, {"gamma_pd", params.gamma_pd},
          {"mse", mse},                {"iters", iterations},          {"converged", converged}};
}

FitResult fit_parameters(const BlochTrajectory& data, const LindbladParams& guess, const FitOptions& options) {
  if (data.size() < 10) throw Error(ErrorKind::InvalidArgument, "fit needs at least 10 time points");
  const Bloch initial = options.initial ? *options.initial : first_sample(data);
  const Theta start = theta_from_params(guess);
  const double initial_mse = loss_theta(start, data, initial);
  if (!std::isfinite(initial_mse)) throw Error(ErrorKind::NonFiniteLoss, "loss is not finite at the guess");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Theta> starts{start};
  for (std::size_t k = 1; k < options.n_starts; ++k)
    starts.push_back({start[0] * (1.0 + options.jitter * u(rng)), start[1] + options.jitter * u(rng),
                      start[2] + options.jitter * u(rng)});

  Run best{start, initial_mse, 0, false};
  bool have = false;
  std::size_t total_iters = 0;
  for (const auto& s : starts) {
    if (!std::isfinite(loss_theta(s, data, initial))) continue;
    Run r = bfgs(s, data, initial, options);
    total_iters += r.iterations;
    if (!have || r.loss < best.loss) {
      best = r;
      have = true;
    }
  }
  if (!std::isfinite(best.loss)) throw Error(ErrorKind::NonFiniteLoss, "loss diverged");

  FitResult res;
  res.params = params_from_theta(best.theta);
  res.mse = best.loss;
  res.initial_mse = initial_mse;
  res.iterations = total_iters;
  res.converged = best.converged;
  if (res.mse > initial_mse) {  // never hand back something worse than the guess
    res.params = params_from_theta(start);
    res.mse = initial_mse;
  }

  const std::array<double, 3> nat{res.params.omega_z, res.params.gamma_ad, res.params.gamma_pd};
  for (std::size_t i = 0; i < 3; ++i) {
    const double h = 1e-4 * std::max(1e-3, std::abs(nat[i]));
    auto at = [&](double delta) {
      std::array<double, 3> p = nat;
      p[i] += delta;
      if (i > 0) p[i] = std::max(p[i], 0.0);
      return mse_impl({p[0], p[1], p[2]}, data, initial);
    };
    res.sensitivity[i] = (at(h) - 2.0 * res.mse + at(-h)) / (h * h);
  }
  return res;
}

}  // namespace pmme
