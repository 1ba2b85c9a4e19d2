// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pmme/lindblad.hpp"

namespace {

using pmme::cplx;
using pmme::Mat;

std::vector<cplx> sorted(std::vector<cplx> v) {
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

std::vector<cplx> eigenvalues(const Mat& m) {
  Eigen::ComplexEigenSolver<Mat> es(m);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

void expect_spectrum(const std::vector<cplx>& got, const std::vector<cplx>& want, double tol) {
  auto a = sorted(got);
  auto b = sorted(want);
  ASSERT_EQ(a.size(), b.size());
  // greedy matching is robust to near-ties in the sort key
  for (const auto& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
    EXPECT_LT(std::abs(*it - x), tol) << x;
    b.erase(it);
  }
}

const pmme::LindbladParams kParams{1.3, 0.07, 0.04};

TEST(Generator, SteadyStateAnnihilated) {
  const auto g = pmme::build_generator(kParams);
  EXPECT_LT(pmme::apply_superop(g.full, pmme::states::ket0()).norm(), 1e-15);
  EXPECT_LT((g.full.m - g.l0.m - g.l1.m).norm(), 1e-15);
}

TEST(Generator, MatchesKroneckerConstruction) {
  const auto g = pmme::build_generator(kParams);
  const Mat ref = oracle::qubit_lindbladian(kParams.omega_z, kParams.gamma_ad, kParams.gamma_pd);
  EXPECT_LT((g.full.m - ref).norm(), 1e-14);
}

TEST(Generator, SpectrumMatchesTable) {
  const auto g = pmme::build_generator(kParams);
  const double w = kParams.omega_z;
  const double dec = 2 * kParams.gamma_pd + 0.5 * kParams.gamma_ad;
  expect_spectrum(eigenvalues(g.full.m), {0.0, -kParams.gamma_ad, cplx(-dec, w), cplx(-dec, -w)}, 1e-12);
}

TEST(Generator, PureCommutatorSpectrum) {
  const auto g = pmme::build_generator({0.8, 0.0, 0.0});
  expect_spectrum(eigenvalues(g.full.m), {0.0, 0.0, cplx(0, 0.8), cplx(0, -0.8)}, 1e-12);
}

TEST(Generator, RejectsNegativeRates) {
  EXPECT_THROW(pmme::build_generator({1.0, -0.1, 0.0}), pmme::Error);
}

TEST(DampingBasis, Biorthonormal) {
  const auto b = pmme::damping_basis(kParams);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      EXPECT_NEAR(std::abs((b.left()[i] * b.right()[j]).trace() - cplx(i == j ? 1.0 : 0.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs((b.left()[2] * b.right()[2]).trace() - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs((b.left()[2] * b.right()[3]).trace()), 0.0, 1e-15);
}

TEST(DampingBasis, EigenvalueSplit) {
  const auto b = pmme::damping_basis(kParams);
  EXPECT_EQ(b.lambda1(2), cplx(-2 * kParams.gamma_pd));
  EXPECT_EQ(b.lambda1(3), cplx(-2 * kParams.gamma_pd));
  EXPECT_EQ(b.lambda1(1), cplx(0.0));
  EXPECT_EQ(b.lambda1(0), cplx(0.0));
  EXPECT_EQ(b.lambda(1), cplx(-kParams.gamma_ad));
  EXPECT_NEAR(std::abs(b.lambda(2) - cplx(-(2 * kParams.gamma_pd + 0.5 * kParams.gamma_ad), kParams.omega_z)), 0.0, 1e-15);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(b.lambda(i), b.lambda0(i) + b.lambda1(i));
    EXPECT_LE(b.lambda(i).real(), 0.0);
  }
}

TEST(DampingBasis, EigenoperatorsOfFullAndSplitGenerators) {
  const auto g = pmme::build_generator(kParams);
  const auto b = pmme::damping_basis(kParams);
  for (std::size_t i = 0; i < 4; ++i) {
    const Mat& r = b.right()[i];
    EXPECT_LT((pmme::apply_superop(g.full, r) - b.lambda(i) * r).norm(), 1e-12);
    EXPECT_LT((pmme::apply_superop(g.l0, r) - b.lambda0(i) * r).norm(), 1e-10);
    EXPECT_LT((pmme::apply_superop(g.l1, r) - b.lambda1(i) * r).norm(), 1e-10);
  }
  // commuting parts
  EXPECT_LT((g.l0.m * g.l1.m - g.l1.m * g.l0.m).norm(), 1e-12);
}

TEST(Propagate, IdentityAtZero) {
  std::mt19937_64 rng(1);
  const Mat rho = oracle::random_density(2, rng);
  EXPECT_LT((pmme::propagate(kParams, rho, 0.0) - rho).norm(), 1e-14);
}

TEST(Propagate, ExcitedPopulationDecays) {
  for (double t : {0.5, 3.0, 40.0}) {
    const Mat rho = pmme::propagate(kParams, pmme::states::ket1(), t);
    EXPECT_NEAR(rho(1, 1).real(), std::exp(-kParams.gamma_ad * t), 1e-14);
  }
}

TEST(Propagate, CoherenceEnvelope) {
  for (double t : {0.0, 1.7, 12.0}) {
    const Mat rho = pmme::propagate(kParams, pmme::states::plus(), t);
    const double sx = (rho * pmme::pauli::X()).trace().real();
    EXPECT_NEAR(sx, std::exp(-(2 * kParams.gamma_pd + 0.5 * kParams.gamma_ad) * t) * std::cos(kParams.omega_z * t), 1e-14);
  }
}

TEST(Propagate, MatchesRk4AndDenseExponential) {
  std::mt19937_64 rng(2);
  const Mat l = oracle::qubit_lindbladian(kParams.omega_z, kParams.gamma_ad, kParams.gamma_pd);
  const Mat rho0 = oracle::random_density(2, rng);
  for (double t : {5.0, 37.0, 100.0}) {
    const Mat got = pmme::propagate(kParams, rho0, t);
    const Mat rk = oracle::unvec(oracle::rk4(l, oracle::vec(rho0), t, static_cast<std::size_t>(t / 0.002)), 2);
    const Mat ex = oracle::unvec(oracle::expm(l * t) * oracle::vec(rho0), 2);
    EXPECT_LT((got - rk).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((got - ex).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(std::abs(got.trace() - 1.0), 0.0, 1e-10);
    EXPECT_LT((got - got.adjoint()).norm(), 1e-10);
  }
}

TEST(Coefficients, PlusState) {
  const auto b = pmme::damping_basis(kParams);
  const auto mu = b.coefficients(pmme::states::plus());
  const double r2 = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(mu[0] - r2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(mu[1] + r2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(mu[2] - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(mu[3] - 0.5), 0.0, 1e-15);
}

TEST(Coefficients, RoundTripAndTraceMode) {
  std::mt19937_64 rng(3);
  const auto b = pmme::damping_basis(kParams);
  std::vector<double> t;
  std::vector<Mat> rhos;
  const Mat rho0 = oracle::random_density(2, rng);
  for (int n = 0; n < 20; ++n) {
    t.push_back(0.5 * n);
    rhos.push_back(pmme::propagate(b, rho0, t.back()));
  }
  const auto s = pmme::expand_coefficients(b, t, rhos);
  for (std::size_t n = 0; n < t.size(); ++n) {
    EXPECT_LT((pmme::reconstruct_state(b, s.mu[n]) - rhos[n]).norm(), 1e-12);
    EXPECT_NEAR(std::abs(s.mu[n][0] - 1.0 / std::sqrt(2.0)), 0.0, 1e-12);
    for (std::size_t i = 0; i < 4; ++i)
      EXPECT_NEAR(std::abs(s.mu[n][i] - s.mu[0][i] * std::exp(b.lambda(i) * t[n])), 0.0, 1e-12);
  }
  const auto x2 = s.xi(2);
  const auto x3 = s.xi(3);
  EXPECT_EQ(x2.front(), cplx(1.0));
  for (std::size_t n = 0; n < t.size(); ++n) EXPECT_NEAR(std::abs(x2[n] - std::conj(x3[n])), 0.0, 1e-12);
}

TEST(Coefficients, UnexcitedModeRefused) {
  const auto b = pmme::damping_basis(kParams);
  const auto s = pmme::expand_coefficients(b, {0.0, 1.0}, {pmme::states::ket0(), pmme::states::ket0()});
  EXPECT_EQ(std::abs(s.mu[0][2]), 0.0);
  EXPECT_EQ(std::abs(s.mu[0][3]), 0.0);
  try {
    s.xi(2);
    FAIL();
  } catch (const pmme::Error& e) {
    EXPECT_EQ(e.kind(), pmme::ErrorKind::ModeUnexcited);
  }
}

TEST(Coefficients, CsvLayout) {
  const auto b = pmme::damping_basis(kParams);
  const auto s = pmme::expand_coefficients(b, {0.0}, {pmme::states::plus()});
  std::ostringstream os;
  pmme::write_coefficients_csv(os, s);
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,re_mu0,im_mu0,re_mu1,im_mu1,re_mu2,im_mu2,re_mu3,im_mu3");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

}  // namespace
