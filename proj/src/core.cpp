// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "pmme/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace pmme {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::InfiniteDivergence: return "infinite divergence";
    case ErrorKind::Unreconstructable: return "unreconstructable";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::ModeUnexcited: return "mode unexcited";
    case ErrorKind::NoKernelInformation: return "mode carries no kernel information";
    case ErrorKind::RankDeficient: return "rank deficient";
    case ErrorKind::MissingSettings: return "missing settings";
    case ErrorKind::UnphysicalInput: return "unphysical input";
    case ErrorKind::GridMismatch: return "grid mismatch";
    case ErrorKind::DimensionCap: return "dimension cap exceeded";
    case ErrorKind::NotProductState: return "not a product state";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::InvalidConfig: return "invalid config";
    case ErrorKind::NonFiniteLoss: return "non-finite loss";
  }
  return "error";
}

namespace {

std::size_t isqrt_exact(std::size_t n, const char* what) {
  auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (r * r != n) throw Error(ErrorKind::DimensionMismatch, what);
  return r;
}

void require_square(const Mat& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorKind::DimensionMismatch, what);
}

double xlog2x(double p) { return p > kSupportThreshold ? p * std::log2(p) : 0.0; }

}  // namespace

// ---------------------------------------------------------------- types

DensityMatrix::DensityMatrix(Mat m) : m_(std::move(m)) {
  require_square(m_, "density matrix must be square");
  if ((m_ - m_.adjoint()).norm() > 1e-12)
    throw Error(ErrorKind::UnphysicalInput, "density matrix not Hermitian");
  if (std::abs(m_.trace() - cplx(1.0)) > 1e-10)
    throw Error(ErrorKind::UnphysicalInput, "density matrix trace != 1");
  if (min_eigenvalue(m_) < -1e-10)
    throw Error(ErrorKind::UnphysicalInput, "density matrix not PSD");
}

DensityMatrix DensityMatrix::unchecked(Mat m) {
  DensityMatrix d;
  d.m_ = std::move(m);
  return d;
}

std::size_t ChoiMatrix::dim() const {
  return isqrt_exact(static_cast<std::size_t>(m.rows()), "Choi size is not d^2");
}

std::size_t SuperoperatorMatrix::dim() const {
  return isqrt_exact(static_cast<std::size_t>(m.rows()), "superoperator size is not d^2");
}

namespace pauli {
Mat I() { return Mat::Identity(2, 2); }
Mat X() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Mat Y() {
  Mat m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}
Mat Z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
Mat sigma_minus() {
  Mat m = Mat::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}
Mat sigma_plus() {
  Mat m = Mat::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}
}  // namespace pauli

namespace states {
Mat from_bloch(double x, double y, double z) {
  return 0.5 * (pauli::I() + x * pauli::X() + y * pauli::Y() + z * pauli::Z());
}
Mat ket0() { return from_bloch(0, 0, 1); }
Mat ket1() { return from_bloch(0, 0, -1); }
Mat plus() { return from_bloch(1, 0, 0); }
Mat minus() { return from_bloch(-1, 0, 0); }
Mat plus_i() { return from_bloch(0, 1, 0); }
Mat minus_i() { return from_bloch(0, -1, 0); }
Mat bell_phi_plus() {
  Vec psi = Vec::Zero(4);
  psi(0) = psi(3) = 1.0 / std::numbers::sqrt2;
  return psi * psi.adjoint();
}
}  // namespace states

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat dagger(const Mat& a) { return a.adjoint(); }

Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

// ---------------------------------------------------------------- vec / reshuffle

Vec vectorize(const Mat& rho) {
  require_square(rho, "vectorize expects a square matrix");
  const Eigen::Index d = rho.rows();
  Vec v(d * d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) v(i + d * j) = rho(i, j);
  return v;
}

Mat devectorize(const Vec& v) {
  const auto d = static_cast<Eigen::Index>(
      isqrt_exact(static_cast<std::size_t>(v.size()), "vector length is not d^2"));
  Mat m(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) m(i, j) = v(i + d * j);
  return m;
}

SuperoperatorMatrix reshuffle(const ChoiMatrix& chi) {
  require_square(chi.m, "reshuffle expects a square matrix");
  const auto d = static_cast<Eigen::Index>(chi.dim());
  Mat s(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < d; ++l)
          s(i + d * j, k + d * l) = chi.m(k * d + i, l * d + j);
  return {s};
}

ChoiMatrix reshuffle_inverse(const SuperoperatorMatrix& sup) {
  require_square(sup.m, "reshuffle_inverse expects a square matrix");
  const auto d = static_cast<Eigen::Index>(sup.dim());
  Mat chi(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < d; ++l)
          chi(k * d + i, l * d + j) = sup.m(i + d * j, k + d * l);
  return {chi};
}

ChoiMatrix identity_choi(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Vec gamma = Vec::Zero(n * n);
  for (Eigen::Index k = 0; k < n; ++k) gamma(k * n + k) = 1.0;
  return {gamma * gamma.adjoint()};
}

Mat apply_superop(const SuperoperatorMatrix& s, const Mat& rho) {
  if (s.m.rows() != rho.size())
    throw Error(ErrorKind::DimensionMismatch, "superoperator/state size");
  return devectorize(s.m * vectorize(rho));
}

Mat apply_choi(const ChoiMatrix& chi, const Mat& rho) {
  const auto d = static_cast<Eigen::Index>(chi.dim());
  if (rho.rows() != d || rho.cols() != d)
    throw Error(ErrorKind::DimensionMismatch, "Choi/state size");
  // Tr_in[chi (rho^T (x) I)]
  Mat out = Mat::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index l = 0; l < d; ++l)
      out += rho(k, l) * chi.m.block(k * d, l * d, d, d);
  return out;
}

Mat choi_output_trace(const ChoiMatrix& chi) {
  const auto d = static_cast<Eigen::Index>(chi.dim());
  Mat out(d, d);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index l = 0; l < d; ++l) out(k, l) = chi.m.block(k * d, l * d, d, d).trace();
  return out;
}

// ---------------------------------------------------------------- partial trace

Mat reduce_qubits(const Mat& rho, std::size_t n_qubits, const std::vector<std::size_t>& keep) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (static_cast<std::size_t>(rho.rows()) != dim || rho.cols() != rho.rows())
    throw Error(ErrorKind::DimensionMismatch, "reduce_qubits: state size != 2^n");
  for (auto q : keep)
    if (q >= n_qubits) throw Error(ErrorKind::InvalidArgument, "reduce_qubits: qubit index");

  std::vector<std::size_t> traced;
  for (std::size_t q = 0; q < n_qubits; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);

  auto bit = [n_qubits](std::size_t q) { return n_qubits - 1 - q; };
  auto compose = [&](std::size_t kept_idx, std::size_t traced_idx) {
    std::size_t full = 0;
    for (std::size_t a = 0; a < keep.size(); ++a)
      if ((kept_idx >> (keep.size() - 1 - a)) & 1U) full |= std::size_t{1} << bit(keep[a]);
    for (std::size_t b = 0; b < traced.size(); ++b)
      if ((traced_idx >> b) & 1U) full |= std::size_t{1} << bit(traced[b]);
    return static_cast<Eigen::Index>(full);
  };

  const std::size_t dk = std::size_t{1} << keep.size();
  const std::size_t dt = std::size_t{1} << traced.size();
  Mat out = Mat::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      cplx acc = 0.0;
      for (std::size_t r = 0; r < dt; ++r) acc += rho(compose(i, r), compose(j, r));
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
    }
  return out;
}

Mat partial_trace(const Mat& rho_ab, Subsystem traced) {
  if (rho_ab.rows() != 4 || rho_ab.cols() != 4)
    throw Error(ErrorKind::DimensionMismatch, "partial_trace expects a two-qubit state");
  return reduce_qubits(rho_ab, 2, {traced == Subsystem::A ? std::size_t{1} : std::size_t{0}});
}

// ---------------------------------------------------------------- spectra & distances

RVec hermitian_eigenvalues(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const Mat& h) { return hermitian_eigenvalues(h).minCoeff(); }

double trace_distance(const Mat& rho, const Mat& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw Error(ErrorKind::DimensionMismatch, "trace_distance");
  return 0.5 * hermitian_eigenvalues(rho - sigma).cwiseAbs().sum();
}

double von_neumann_entropy(const Mat& rho) {
  double s = 0.0;
  for (double p : hermitian_eigenvalues(rho)) s -= xlog2x(p);
  return s;
}

double relative_entropy(const Mat& rho, const Mat& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw Error(ErrorKind::DimensionMismatch, "relative_entropy");
  Eigen::SelfAdjointEigenSolver<Mat> er(hermitian_part(rho));
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(sigma));
  const RVec& p = er.eigenvalues();
  const RVec& q = es.eigenvalues();
  // |<r_i|s_j>|^2 overlaps
  const Eigen::MatrixXd overlap = (er.eigenvectors().adjoint() * es.eigenvectors()).cwiseAbs2();

  double d = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= kSupportThreshold) continue;
    d += p(i) * std::log2(p(i));
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      if (overlap(i, j) <= kSupportThreshold) continue;
      if (q(j) <= kSupportThreshold)
        throw Error(ErrorKind::InfiniteDivergence, "supp(rho) not contained in supp(sigma)");
      d -= p(i) * overlap(i, j) * std::log2(q(j));
    }
  }
  return std::max(d, 0.0);
}

double purity(const Mat& rho) { return (rho * rho).trace().real(); }

double fidelity(const Mat& rho, const Mat& sigma) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(rho));
  const RVec w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Mat sq = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
  const RVec m = hermitian_eigenvalues(sq * sigma * sq).cwiseMax(0.0).cwiseSqrt();
  const double f = m.sum();
  return f * f;
}

EntropyReport entropies(const Mat& rho_ab) {
  EntropyReport r;
  r.s_a = von_neumann_entropy(partial_trace(rho_ab, Subsystem::B));
  r.s_b = von_neumann_entropy(partial_trace(rho_ab, Subsystem::A));
  r.s_ab = von_neumann_entropy(rho_ab);
  r.mutual_information = r.s_a + r.s_b - r.s_ab;
  r.conditional_entropy = r.s_ab - r.s_b;
  r.purity = purity(rho_ab);
  return r;
}

// ---------------------------------------------------------------- projections

DensityMatrix project_state_physical(const Mat& raw) {
  require_square(raw, "project_state_physical expects a square matrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(raw));
  const RVec clipped = es.eigenvalues().cwiseMax(0.0);
  const double mass = clipped.sum();
  if (!(mass > kSupportThreshold))
    throw Error(ErrorKind::Unreconstructable, "no positive eigenvalue to keep");
  Mat rho = es.eigenvectors() * (clipped / mass).asDiagonal() * es.eigenvectors().adjoint();
  return DensityMatrix::unchecked(hermitian_part(rho));
}

namespace {

Mat project_psd(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const RVec w = es.eigenvalues().cwiseMax(0.0);
  return hermitian_part(es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint());
}

Mat project_tp(const Mat& chi, Eigen::Index d) {
  const Mat defect = (Mat::Identity(d, d) - choi_output_trace({chi})) / static_cast<double>(d);
  return chi + kron(defect, Mat::Identity(d, d));
}

}  // namespace

CptpProjection project_choi_cptp(const ChoiMatrix& raw, std::size_t max_iter, double step_tol) {
  require_square(raw.m, "project_choi_cptp expects a square matrix");
  const auto d = static_cast<Eigen::Index>(raw.dim());
  const Mat start = hermitian_part(raw.m);

  CptpProjection out;
  const double tp_defect = (choi_output_trace({start}) - Mat::Identity(d, d)).norm();
  if (tp_defect < 1e-12 && min_eigenvalue(start) >= -1e-12) {
    out.choi = {start};
    out.displacement = (start - raw.m).norm();
    return out;
  }

  Mat x = start;
  double step = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    Mat next = project_tp(project_psd(x), d);
    step = (next - x).norm();
    x = std::move(next);
    out.iterations = it;
    if (step < step_tol) {
      out.choi = {x};
      out.displacement = (x - raw.m).norm();
      return out;
    }
  }
  throw Error(ErrorKind::NonConvergence, "CPTP projection hit the iteration cap", step);
}

Mat pseudo_inverse(const Mat& a, double rel_cutoff) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& sv = svd.singularValues();
  const double cut = sv.size() > 0 ? rel_cutoff * sv(0) : 0.0;
  RVec inv = RVec::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

std::size_t numerical_rank(const Mat& a, double rel_cutoff) {
  Eigen::JacobiSVD<Mat> svd(a);
  const RVec& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cut = rel_cutoff * sv(0);
  return static_cast<std::size_t>((sv.array() > cut).count());
}

}  // namespace pmme
