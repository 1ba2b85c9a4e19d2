// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Linear-inversion state and process tomography with the Pauli-6 POVM.
//
// Probabilities are per-basis conditionals: each basis is a separate setting
// whose outcomes sum to one. Design rows satisfy A x = y with
//   QST: x = vec(rho),  y_{m,k}   = Tr(rho E_{m,k})
//   QPT: x = vec(chi),  y_{p,m,k} = Tr(chi (rho_p^T (x) E_{m,k})) = Tr(Phi(rho_p) E_{m,k})

#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "pmme/core.hpp"

namespace pmme {

struct PovmBasis {
  std::string label;             // "X", "Z", "XY", ...
  std::vector<Mat> effects;      // ordered by outcome bitstring
};

// 3^n tensor-product Pauli bases with 2^n outcomes each.
std::vector<PovmBasis> pauli6_povm(std::size_t n_qubits);

// Inputs for single-qubit process tomography: |0>, |1>, |+>, |+i>.
std::vector<Mat> qpt_preparations();
std::vector<std::string> qpt_preparation_labels();

enum class TomoMode { QST, QPT };

struct TomographyDesign {
  TomoMode mode = TomoMode::QST;
  std::size_t dim = 2;
  std::vector<PovmBasis> bases;
  std::vector<Mat> preps;  // empty for QST
  Mat A;

  std::size_t n_preps() const { return preps.empty() ? 1 : preps.size(); }
  std::size_t n_outcomes() const { return bases.front().effects.size(); }
  std::size_t row(std::size_t prep, std::size_t basis, std::size_t outcome) const;
};

// Throws RankDeficient if the design is not tomographically complete.
TomographyDesign build_design(TomoMode mode, std::size_t dim);

struct MeasurementRecord {
  struct Entry {
    int prep = -1;  // -1 when there is no preparation index (QST)
    std::size_t basis = 0;
    std::size_t outcome = 0;
    std::uint64_t count = 0;
    std::uint64_t shots = 0;  // 0 marks exact probabilities
    double p_hat = 0.0;
  };
  std::vector<Entry> entries;
};

// Born probabilities of rho, clipped to [0,1]; throws UnphysicalInput below -1e-9.
std::vector<double> born_probabilities(const Mat& rho, const PovmBasis& basis);

// Multinomial counts per basis; shots == 0 stores exact probabilities.
MeasurementRecord sample_counts(const Mat& rho, const std::vector<PovmBasis>& bases,
                                std::uint64_t shots, std::mt19937_64& rng);
MeasurementRecord sample_counts(const Mat& rho, const std::vector<PovmBasis>& bases,
                                std::uint64_t shots, std::uint64_t seed);

// QPT data from the output states Phi(rho_p), one per design preparation.
MeasurementRecord sample_process(const TomographyDesign& design, const std::vector<Mat>& outputs,
                                 std::uint64_t shots, std::mt19937_64& rng);

struct StateEstimate {
  DensityMatrix rho;
  Mat raw;
  double displacement = 0.0;  // ||rho - raw||_F
  double raw_misfit = 0.0;    // sum (A x - y)^2 before projection
  double misfit = 0.0;        // after projection
};

struct ProcessEstimate {
  ChoiMatrix choi;
  Mat raw;
  double displacement = 0.0;
  double raw_misfit = 0.0;
  double misfit = 0.0;
};

StateEstimate reconstruct_qst(const TomographyDesign& design, const MeasurementRecord& record);
ProcessEstimate reconstruct_qpt(const TomographyDesign& design, const MeasurementRecord& record);

// Columns: prep,basis,outcome,count,shots,p_hat (optionally led by t).
void write_record_csv(std::ostream& os, const TomographyDesign& design,
                      const MeasurementRecord& record);
void write_records_csv(std::ostream& os, const TomographyDesign& design,
                       const std::vector<double>& times,
                       const std::vector<MeasurementRecord>& records);
MeasurementRecord read_record_csv(std::istream& is, const TomographyDesign& design);

}  // namespace pmme
