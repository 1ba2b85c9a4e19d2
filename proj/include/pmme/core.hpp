// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Linear algebra on states and channels.
//
// Conventions:
//   vec(rho)[i + d*j] = rho(i, j)                      (column stacking)
//   chi = sum_{kl} |k><l| (x) Phi(|k><l|)              (input factor first)
//   S[(i + d*j), (k + d*l)] = chi[(k*d + i), (l*d + j)]
// With these, vec(Phi(rho)) = S * vec(rho) and
// Phi(rho) = Tr_in[chi (rho^T (x) I)]. Trace preservation is Tr_out chi = I.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "pmme/error.hpp"

namespace pmme {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kSupportThreshold = 1e-10;
inline constexpr double kPinvCutoff = 1e-10;

// A validated d x d density matrix.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  // Throws UnphysicalInput unless Hermitian, unit trace and PSD.
  explicit DensityMatrix(Mat m);

  static DensityMatrix unchecked(Mat m);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  operator const Mat&() const { return m_; }

 private:
  Mat m_;
};

// d^2 x d^2 Choi matrix; see the convention at the top of this file.
struct ChoiMatrix {
  Mat m;
  std::size_t dim() const;
};

// d^2 x d^2 matrix acting on column-stacked vectors.
struct SuperoperatorMatrix {
  Mat m;
  std::size_t dim() const;
};

// Pauli matrices and a few standard states.
namespace pauli {
Mat I();
Mat X();
Mat Y();
Mat Z();
Mat sigma_minus();  // |0><1|
Mat sigma_plus();   // |1><0|
}  // namespace pauli

namespace states {
Mat ket0();
Mat ket1();
Mat plus();
Mat minus();
Mat plus_i();
Mat minus_i();
Mat bell_phi_plus();
Mat from_bloch(double x, double y, double z);
}  // namespace states

Mat kron(const Mat& a, const Mat& b);
Mat dagger(const Mat& a);
Mat hermitian_part(const Mat& a);

Vec vectorize(const Mat& rho);
Mat devectorize(const Vec& v);

SuperoperatorMatrix reshuffle(const ChoiMatrix& chi);
ChoiMatrix reshuffle_inverse(const SuperoperatorMatrix& s);

ChoiMatrix identity_choi(std::size_t d);
Mat apply_choi(const ChoiMatrix& chi, const Mat& rho);
Mat apply_superop(const SuperoperatorMatrix& s, const Mat& rho);
// Partial trace over the output factor; equals I for trace-preserving maps.
Mat choi_output_trace(const ChoiMatrix& chi);

enum class Subsystem { A, B };
// Traces out the given subsystem of a two-qubit state.
Mat partial_trace(const Mat& rho_ab, Subsystem traced);
// Keeps the listed qubits (0 is the most significant) of an n-qubit state.
Mat reduce_qubits(const Mat& rho, std::size_t n_qubits,
                  const std::vector<std::size_t>& keep);

RVec hermitian_eigenvalues(const Mat& h);
double min_eigenvalue(const Mat& h);

double trace_distance(const Mat& rho, const Mat& sigma);
// Bits. Throws InfiniteDivergence when supp(rho) is not inside supp(sigma).
double relative_entropy(const Mat& rho, const Mat& sigma);
double von_neumann_entropy(const Mat& rho);
double purity(const Mat& rho);
// Uhlmann fidelity (squared convention); for Choi matrices pass normalized
// inputs.
double fidelity(const Mat& rho, const Mat& sigma);

struct EntropyReport {
  double s_a = 0.0;
  double s_b = 0.0;
  double s_ab = 0.0;
  double mutual_information = 0.0;
  double conditional_entropy = 0.0;  // S(A|B) = S(AB) - S(B)
  double purity = 0.0;
};
EntropyReport entropies(const Mat& rho_ab);

DensityMatrix project_state_physical(const Mat& raw);

struct CptpProjection {
  ChoiMatrix choi;
  std::size_t iterations = 0;
  double displacement = 0.0;  // Frobenius distance from the input
};
CptpProjection project_choi_cptp(const ChoiMatrix& raw,
                                 std::size_t max_iter = 1000,
                                 double step_tol = 1e-10);

Mat pseudo_inverse(const Mat& a, double rel_cutoff = kPinvCutoff);
std::size_t numerical_rank(const Mat& a, double rel_cutoff = kPinvCutoff);

}  // namespace pmme
