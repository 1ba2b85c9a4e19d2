// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance checks. One PASS/FAIL line per criterion; the process
// exits nonzero if any criterion fails or exceeds its time budget.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "pmme/pipeline.hpp"

namespace {

using pmme::cplx;
using pmme::Mat;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 1. Damping basis biorthonormality and generator spectrum.
Outcome damping_basis() {
  Outcome o;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> w(-3.0, 3.0), g(0.0, 0.5);
  double worst_bi = 0.0, worst_spec = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const pmme::LindbladParams p{w(rng), g(rng), g(rng)};
    const pmme::DampingBasis basis(p);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        worst_bi = std::max(worst_bi, std::abs((basis.left()[i] * basis.right()[j]).trace() - cplx(i == j ? 1.0 : 0.0)));

    const cplx iw(0.0, p.omega_z);
    std::vector<cplx> table{0.0, -p.gamma_ad, iw - p.gamma_ad / 2 - 2 * p.gamma_pd, -iw - p.gamma_ad / 2 - 2 * p.gamma_pd};
    const Eigen::ComplexEigenSolver<Mat> es(pmme::build_generator(p).full.m);
    std::vector<cplx> eig(es.eigenvalues().data(), es.eigenvalues().data() + 4);
    for (const auto& t : table) {
      auto it = std::min_element(eig.begin(), eig.end(), [&](cplx a, cplx b) { return std::abs(a - t) < std::abs(b - t); });
      worst_spec = std::max(worst_spec, std::abs(*it - t));
      eig.erase(it);
    }
  }
  o.require(worst_bi < 1e-12, "biorthonormality " + num(worst_bi));
  o.require(worst_spec < 1e-10, "spectrum " + num(worst_spec));
  o.detail = o.ok ? "max |Tr[L_i R_j] - delta| " + num(worst_bi) + ", spectrum " + num(worst_spec) : o.detail;
  return o;
}

// 2. Closed form against the full Lindbladian for 1..3 spectators.
Outcome closed_form_equivalence() {
  Outcome o;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> sym(-1.0, 1.0), rate(0.0, 0.05), angle(0.0, M_PI);
  const auto times = pmme::uniform_grid(101, 1.0);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      pmme::ZZModel m;
      m.n_spectators = n;
      m.omega_0 = sym(rng);
      for (std::size_t q = 0; q < n; ++q) m.J.push_back(sym(rng));
      for (std::size_t q = 0; q <= n; ++q) {
        m.gamma_down.push_back(rate(rng));
        m.gamma_phi.push_back(q == 0 ? rate(rng) : 0.0);
      }
      std::vector<std::pair<double, double>> angles;
      for (std::size_t q = 0; q <= n; ++q) angles.emplace_back(angle(rng), 2 * angle(rng));
      const auto init = pmme::ProductState::from_angles(angles);
      const auto cf = pmme::closed_form_bloch(m, init, times);
      const auto bf = pmme::brute_force_evolve(m, init.density(), times).main;
      for (std::size_t i = 0; i < times.size(); ++i)
        worst = std::max({worst, std::abs(cf.vx[i] - bf.vx[i]), std::abs(cf.vy[i] - bf.vy[i]), std::abs(cf.vz[i] - bf.vz[i])});
    }
  }
  o.require(worst < 1e-6, "max |dv| " + num(worst));
  if (o.ok) o.detail = "max |dv| " + num(worst) + " over 30 draws";
  return o;
}

pmme::ExperimentConfig lindblad_config() {
  pmme::ExperimentConfig c;
  c.model = pmme::LindbladParams{1.0, 0.02, 0.01};
  c.grid = {100, 0.5};
  c.fit_guess = {0.9, 0.015, 0.015};
  return c;
}

// 3. Markovian data raises no flag.
Outcome markovian_null() {
  Outcome o;
  // The window outlasts the coherence decay so truncation does not bias k~.
  auto cfg = lindblad_config();
  cfg.grid = {800, 0.5};
  const auto map = pmme::cp_divisibility_map(pmme::tomography_process(cfg).choi);
  o.require(map.min_value() >= -1e-7, "cp-div min " + num(map.min_value()));

  double rise = -1.0;
  for (const auto& [a, b] : cfg.backflow_pairs) {
    const auto ra = pmme::simulate_main(cfg, a), rb = pmme::simulate_main(cfg, b);
    const auto bf = pmme::backflow_series(ra.times, ra.states, rb.states);
    for (std::size_t i = 1; i < bf.times.size(); ++i) rise = std::max(rise, bf.trace_distance[i] - bf.trace_distance[i - 1]);
  }
  o.require(rise <= 1e-9, "trace distance rises by " + num(rise));

  const auto run = pmme::kernel_state(cfg, "+");
  const auto& grid = run.kernel.grid;
  std::vector<std::size_t> bins(grid.n);
  for (std::size_t k = 0; k < grid.n; ++k) bins[k] = k;
  std::stable_sort(bins.begin(), bins.end(), [&](auto a, auto b) { return std::abs(grid.omega(a)) < std::abs(grid.omega(b)); });
  double flat = 0.0;
  for (const auto& mk : run.kernel.modes)
    for (std::size_t j = 0; j < grid.n / 2; ++j) flat = std::max(flat, std::abs(mk.k_tilde[bins[j]] - 1.0));
  o.require(flat < 0.05, "max |k~ - 1| " + num(flat));
  if (o.ok) o.detail = "cp-div min " + num(map.min_value()) + ", max dT " + num(rise) + ", max |k~ - 1| " + num(flat);
  return o;
}

pmme::ExperimentConfig zz_config(std::size_t n, double dt) {
  pmme::ExperimentConfig c;
  c.model = pmme::ZZModel{1, 0.0, {0.5}, {0.01, 0.01}, {0.005, 0.0}};
  c.grid = {n, dt};
  c.fit_guess = {0.1, 0.01, 0.01};
  return c;
}

// 4. ZZ spectator triggers every witness.
Outcome non_markovian_detection() {
  Outcome o;
  const auto cfg = zz_config(120, 0.5);
  const auto& m = std::get<pmme::ZZModel>(cfg.model);
  o.require(m.gamma_spectator(1) / (2 * m.J[0]) <= 0.1, "coupling regime");

  const auto map = pmme::cp_divisibility_map(pmme::tomography_process(cfg).choi);
  o.require(map.min_value() < -0.01, "cp-div min " + num(map.min_value()));

  const auto ra = pmme::tomography_main(cfg, "+").estimate, rb = pmme::tomography_main(cfg, "-").estimate;
  const auto bf = pmme::backflow_series(ra.times, ra.states, rb.states, cfg.backflow_threshold());
  const double period = bf.revival_period();
  o.require(bf.intervals.size() >= 1, "no backflow interval");
  o.require(std::abs(period - M_PI / m.J[0]) <= cfg.grid.dt, "revival period " + num(period));

  const auto pair = pmme::tomography_pair(cfg, "+").estimate;
  const auto ct = pmme::crosstalk_metrics(pair.times, pair.states);
  double peak = 0.0;
  for (const auto& p : ct) peak = std::max(peak, p.metrics.mutual_information);
  o.require(ct.front().metrics.mutual_information < 1e-9, "I(A:B) at t=0 " + num(ct.front().metrics.mutual_information));
  o.require(peak > 0.1, "peak I(A:B) " + num(peak));
  if (o.ok)
    o.detail = "cp-div min " + num(map.min_value()) + ", " + std::to_string(bf.intervals.size()) + " backflow intervals, period " +
               num(period) + " vs pi/J " + num(M_PI / m.J[0]) + ", peak I(A:B) " + num(peak) + " bits";
  return o;
}

struct KernelCase {
  pmme::DampingBasis basis{pmme::LindbladParams{0.5, 0.02, 0.05}};
  double gk = 0.2;
  pmme::LaplaceGrid grid = pmme::LaplaceGrid::make(512, 0.2);
  std::vector<double> times;
  pmme::KernelEstimate est;
  std::vector<cplx> xi2;
};

KernelCase kernel_case() {
  KernelCase kc;
  for (std::size_t i = 0; i < kc.grid.n; ++i) kc.times.push_back(kc.grid.time(i));
  const auto xi = oracle::exponential_kernel_solution(kc.basis.lambda0(2), kc.basis.lambda1(2), kc.gk);
  const std::array<cplx, 4> mu0 = kc.basis.coefficients(pmme::states::from_bloch(0.6, 0.3, 0.2));
  std::vector<Mat> states;
  for (double t : kc.times) {
    const cplx c = mu0[2] * xi(t);
    states.push_back(kc.basis.reconstruct({mu0[0], mu0[1] * std::exp(kc.basis.lambda(1) * t), c, std::conj(c)}));
    kc.xi2.push_back(xi(t));
  }
  kc.est = pmme::reconstruct_kernel(pmme::expand_coefficients(kc.basis, kc.times, states), kc.basis, kc.grid);
  return kc;
}

// 5. Exponential kernel recovered from its analytic PMME solution.
Outcome kernel_oracle() {
  Outcome o;
  const auto kc = kernel_case();
  std::vector<cplx> ref;
  for (double t : kc.times) ref.push_back(kc.gk * std::exp(-kc.gk * t));
  const auto* k2 = kc.est.find(2);
  const auto* k3 = kc.est.find(3);
  o.require(k2 && k3, "missing mode");
  if (!o.ok) return o;
  const double err = oracle::rel_l2(k2->k, ref, 1, kc.grid.n / 2);
  double conj = 0.0;
  for (std::size_t i = 0; i < kc.grid.n; ++i) conj = std::max(conj, std::abs(k2->k[i] - std::conj(k3->k[i])));
  o.require(err < 0.10, "relative L2 " + num(err));
  o.require(conj < 1e-8, "|k2 - k3*| " + num(conj));
  if (o.ok) o.detail = "relative L2 " + num(err) + " on first half-window, max |k2 - k3*| " + num(conj);
  return o;
}

// 6. Re-integrating with the reconstructed kernel reproduces the data.
Outcome forward_consistency() {
  Outcome o;
  const auto kc = kernel_case();
  double worst = 0.0;
  const std::size_t trusted = static_cast<std::size_t>(std::count(kc.est.low_confidence.begin(), kc.est.low_confidence.end(), false));
  for (const auto& mk : kc.est.modes) {
    std::vector<cplx> target = kc.xi2;
    if (mk.mode == 3)
      for (auto& v : target) v = std::conj(v);
    const auto again = pmme::integrate_pmme_mode(mk.lambda0, mk.lambda1, mk.lambda, mk.k, kc.grid.dt);
    worst = std::max(worst, oracle::rel_l2(again, target, 0, trusted));
  }
  o.require(worst < 0.05, "relative L2 " + num(worst));
  if (o.ok) o.detail = "relative L2 " + num(worst) + " over the trusted window";
  return o;
}

// 7. Markovian envelope recovery, noiseless and with shot noise.
Outcome fit_recovery() {
  Outcome o;
  const pmme::LindbladParams truth{1.0, 0.02, 0.01};
  auto rel = [&](const pmme::LindbladParams& p) {
    return std::array<double, 3>{std::abs(p.omega_z / truth.omega_z - 1), std::abs(p.gamma_ad / truth.gamma_ad - 1),
                                 std::abs(p.gamma_pd / truth.gamma_pd - 1)};
  };
  auto cfg = lindblad_config();
  const auto clean = rel(pmme::fit_state(cfg, "+").params);
  for (double e : clean) o.require(e < 0.01, "noiseless error " + num(e));

  cfg.shots = 1024;
  std::array<std::vector<double>, 3> errs;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    cfg.seed = seed;
    const auto e = rel(pmme::fit_state(cfg, "+").params);
    for (std::size_t i = 0; i < 3; ++i) errs[i].push_back(e[i]);
  }
  std::array<double, 3> med{median(errs[0]), median(errs[1]), median(errs[2])};
  for (double e : med) o.require(e < 0.10, "median shot-noise error " + num(e));
  if (o.ok)
    o.detail = "noiseless max " + num(std::max({clean[0], clean[1], clean[2]})) + ", 1024-shot medians " + num(med[0]) + " / " +
               num(med[1]) + " / " + num(med[2]);
  return o;
}

// 8. Tomography exactness and shot-noise scaling.
Outcome tomography() {
  Outcome o;
  std::mt19937_64 rng(808);
  double qst = 0.0;
  for (std::size_t dim : {2u, 4u}) {
    const auto design = pmme::build_design(pmme::TomoMode::QST, dim);
    for (int trial = 0; trial < 10; ++trial) {
      const Mat rho = trial % 2 ? oracle::random_pure(dim, rng) : oracle::random_density(dim, rng);
      const auto est = pmme::reconstruct_qst(design, pmme::sample_counts(rho, design.bases, 0, rng));
      qst = std::max(qst, (est.rho.matrix() - rho).cwiseAbs().maxCoeff());
    }
  }
  double worst_fid = 1.0;
  const auto qpt = pmme::build_design(pmme::TomoMode::QPT, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ks = oracle::random_kraus(2, 1 + trial % 4, rng);
    std::vector<Mat> outs;
    for (const auto& p : qpt.preps) outs.push_back(oracle::apply_kraus(ks, p));
    const auto est = pmme::reconstruct_qpt(qpt, pmme::sample_process(qpt, outs, 0, rng));
    const Mat truth = oracle::choi_of([&](const Mat& x) { return oracle::apply_kraus(ks, x); }, 2);
    worst_fid = std::min(worst_fid, pmme::fidelity(est.choi.m / 2.0, truth / 2.0));
  }
  o.require(qst < 1e-10, "QST error " + num(qst));
  o.require(worst_fid > 1 - 1e-9, "Choi fidelity " + num(worst_fid));

  const auto design = pmme::build_design(pmme::TomoMode::QST, 2);
  const Mat rho = pmme::states::from_bloch(0.3, -0.2, 0.4);
  std::vector<double> e1, e4;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    e1.push_back((pmme::reconstruct_qst(design, pmme::sample_counts(rho, design.bases, 1000, 2 * seed)).rho.matrix() - rho).norm());
    e4.push_back((pmme::reconstruct_qst(design, pmme::sample_counts(rho, design.bases, 4000, 2 * seed + 1)).rho.matrix() - rho).norm());
  }
  const double ratio = median(e1) / median(e4);
  o.require(std::abs(ratio / 2.0 - 1.0) <= 0.3, "error ratio " + num(ratio));
  if (o.ok)
    o.detail = "QST max error " + num(qst) + ", min Choi fidelity 1 - " + num(1 - worst_fid) + ", 4x-shot error ratio " + num(ratio);
  return o;
}

// 9. Kernel frequency tracks J and does not depend on the preparation.
Outcome kernel_frequency() {
  Outcome o;
  const auto cfg = zz_config(50, 2.8);
  const double j = std::get<pmme::ZZModel>(cfg.model).J[0];
  std::vector<std::vector<cplx>> kernels;
  std::size_t trusted = 0;
  double worst_freq = 0.0;
  for (const auto& label : cfg.main_states) {
    const auto run = pmme::kernel_state(cfg, label);
    const auto* mk = run.kernel.find(2);
    o.require(mk != nullptr, "mode 2 missing for " + label);
    if (!mk) return o;
    trusted = static_cast<std::size_t>(std::count(run.kernel.low_confidence.begin(), run.kernel.low_confidence.end(), false));
    const double f = pmme::dominant_frequency(mk->k, cfg.grid.dt, 1, trusted);
    worst_freq = std::max(worst_freq, std::abs(std::abs(f) / j - 1.0));
    kernels.push_back(mk->k);
  }
  double spread = 0.0;
  for (std::size_t s = 1; s < kernels.size(); ++s) spread = std::max(spread, oracle::rel_l2(kernels[s], kernels[0], 1, trusted));
  o.require(worst_freq < 0.10, "frequency error " + num(worst_freq));
  o.require(spread < 0.05, "kernel spread " + num(spread));
  if (o.ok) o.detail = "frequency error " + num(worst_freq) + " vs J, max kernel L2 spread " + num(spread);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // <= 0: no limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "damping basis and generator spectrum", 1.0, damping_basis},
      {2, "closed form vs full Lindbladian", 120.0, closed_form_equivalence},
      {3, "Markovian null suite", 60.0, markovian_null},
      {4, "non-Markovian detection suite", 120.0, non_markovian_detection},
      {5, "exponential kernel oracle", 30.0, kernel_oracle},
      {6, "forward PMME consistency", 0.0, forward_consistency},
      {7, "fit recovery", 120.0, fit_recovery},
      {8, "tomography exactness and scaling", 0.0, tomography},
      {9, "kernel frequency and state independence", 0.0, kernel_frequency},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.ok = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && secs > c.budget_s) {
      out.ok = false;
      out.detail += (out.detail.empty() ? "" : "; ") + std::string("over time budget ") + num(c.budget_s) + " s";
    }
    std::printf("%s criterion %d: %s (%.2f s) %s\n", out.ok ? "PASS" : "FAIL", c.id, c.name, secs, out.detail.c_str());
    std::fflush(stdout);
    failed += out.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
