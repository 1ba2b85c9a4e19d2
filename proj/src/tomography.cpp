// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "pmme/tomography.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "pmme/io.hpp"

namespace pmme {

namespace {

PovmBasis single_qubit_basis(char axis) {
  switch (axis) {
    case 'X': return {"X", {states::plus(), states::minus()}};
    case 'Y': return {"Y", {states::plus_i(), states::minus_i()}};
    default: return {"Z", {states::ket0(), states::ket1()}};
  }
}

// Row r of A with A x = Tr(M x) for x = vec(X): r = vec(M^T)^T.
Eigen::RowVectorXcd design_row(const Mat& m) { return vectorize(m.transpose()).transpose(); }

std::string outcome_label(std::size_t k, std::size_t n_bits) {
  std::string s(n_bits, '0');
  for (std::size_t b = 0; b < n_bits; ++b)
    if ((k >> (n_bits - 1 - b)) & 1U) s[b] = '1';
  return s;
}

std::size_t log2_exact(std::size_t n) {
  std::size_t b = 0;
  while ((std::size_t{1} << b) < n) ++b;
  return b;
}

void draw_multinomial(const std::vector<double>& p, std::uint64_t shots, std::mt19937_64& rng,
                      std::vector<std::uint64_t>& counts) {
  counts.assign(p.size(), 0);
  double remaining_mass = 1.0;
  std::uint64_t remaining = shots;
  for (std::size_t k = 0; k + 1 < p.size() && remaining > 0; ++k) {
    const double q = remaining_mass > 0.0 ? std::clamp(p[k] / remaining_mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::uint64_t> bin(remaining, q);
    counts[k] = bin(rng);
    remaining -= counts[k];
    remaining_mass -= p[k];
  }
  counts.back() += remaining;
}

void append_setting(MeasurementRecord& rec, int prep, std::size_t basis,
                    const std::vector<double>& p, std::uint64_t shots, std::mt19937_64& rng) {
  std::vector<std::uint64_t> counts;
  if (shots > 0) draw_multinomial(p, shots, rng, counts);
  for (std::size_t k = 0; k < p.size(); ++k) {
    MeasurementRecord::Entry e;
    e.prep = prep;
    e.basis = basis;
    e.outcome = k;
    e.shots = shots;
    if (shots > 0) {
      e.count = counts[k];
      e.p_hat = static_cast<double>(counts[k]) / static_cast<double>(shots);
    } else {
      e.p_hat = p[k];
    }
    rec.entries.push_back(e);
  }
}

RVec data_vector(const TomographyDesign& design, const MeasurementRecord& record) {
  const auto rows = static_cast<std::size_t>(design.A.rows());
  RVec y = RVec::Zero(static_cast<Eigen::Index>(rows));
  std::vector<bool> seen(rows, false);
  for (const auto& e : record.entries) {
    const std::size_t p = design.mode == TomoMode::QPT ? static_cast<std::size_t>(std::max(e.prep, 0)) : 0;
    if (design.mode == TomoMode::QPT && (e.prep < 0 || p >= design.preps.size()))
      throw Error(ErrorKind::MissingSettings, "record entry has no valid preparation");
    if (e.basis >= design.bases.size() || e.outcome >= design.n_outcomes())
      throw Error(ErrorKind::DimensionMismatch, "record entry outside the design");
    const std::size_t r = design.row(p, e.basis, e.outcome);
    y(static_cast<Eigen::Index>(r)) = e.p_hat;
    seen[r] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw Error(ErrorKind::MissingSettings, "record does not cover every design setting");
  return y;
}

double misfit(const Mat& a, const Vec& x, const RVec& y) {
  return (a * x - y.cast<cplx>()).squaredNorm();
}

}  // namespace

std::vector<PovmBasis> pauli6_povm(std::size_t n_qubits) {
  if (n_qubits == 0) throw Error(ErrorKind::InvalidArgument, "POVM needs at least one qubit");
  std::vector<PovmBasis> out{PovmBasis{"", {Mat::Ones(1, 1)}}};
  for (std::size_t q = 0; q < n_qubits; ++q) {
    std::vector<PovmBasis> next;
    for (const auto& b : out)
      for (char axis : {'X', 'Y', 'Z'}) {
        const PovmBasis one = single_qubit_basis(axis);
        PovmBasis nb{b.label + one.label, {}};
        for (const auto& e : b.effects)
          for (const auto& f : one.effects) nb.effects.push_back(kron(e, f));
        next.push_back(std::move(nb));
      }
    out = std::move(next);
  }
  return out;
}

std::vector<Mat> qpt_preparations() {
  return {states::ket0(), states::ket1(), states::plus(), states::plus_i()};
}

std::vector<std::string> qpt_preparation_labels() { return {"0", "1", "+", "+i"}; }

std::size_t TomographyDesign::row(std::size_t prep, std::size_t basis, std::size_t outcome) const {
  return (prep * bases.size() + basis) * n_outcomes() + outcome;
}

TomographyDesign build_design(TomoMode mode, std::size_t dim) {
  TomographyDesign d;
  d.mode = mode;
  d.dim = dim;
  if (mode == TomoMode::QST && (dim == 2 || dim == 4)) {
    d.bases = pauli6_povm(dim == 2 ? 1 : 2);
  } else if (mode == TomoMode::QPT && dim == 2) {
    d.bases = pauli6_povm(1);
    d.preps = qpt_preparations();
  } else {
    throw Error(ErrorKind::InvalidArgument, "unsupported tomography mode/dimension");
  }

  const auto unknowns = static_cast<Eigen::Index>(mode == TomoMode::QST ? dim * dim : dim * dim * dim * dim);
  const auto rows = static_cast<Eigen::Index>(d.n_preps() * d.bases.size() * d.n_outcomes());
  d.A.resize(rows, unknowns);
  for (std::size_t p = 0; p < d.n_preps(); ++p)
    for (std::size_t m = 0; m < d.bases.size(); ++m)
      for (std::size_t k = 0; k < d.n_outcomes(); ++k) {
        const Mat& e = d.bases[m].effects[k];
        const Mat op = mode == TomoMode::QST ? e : kron(d.preps[p].transpose(), e);
        d.A.row(static_cast<Eigen::Index>(d.row(p, m, k))) = design_row(op);
      }
  if (numerical_rank(d.A) != static_cast<std::size_t>(unknowns))
    throw Error(ErrorKind::RankDeficient, "design is not tomographically complete");
  return d;
}

std::vector<double> born_probabilities(const Mat& rho, const PovmBasis& basis) {
  std::vector<double> p;
  p.reserve(basis.effects.size());
  for (const auto& e : basis.effects) {
    const double v = (rho * e).trace().real();
    if (v < -1e-9) throw Error(ErrorKind::UnphysicalInput, "negative Born probability");
    p.push_back(std::clamp(v, 0.0, 1.0));
  }
  return p;
}

MeasurementRecord sample_counts(const Mat& rho, const std::vector<PovmBasis>& bases,
                                std::uint64_t shots, std::mt19937_64& rng) {
  MeasurementRecord rec;
  for (std::size_t m = 0; m < bases.size(); ++m)
    append_setting(rec, -1, m, born_probabilities(rho, bases[m]), shots, rng);
  return rec;
}

MeasurementRecord sample_counts(const Mat& rho, const std::vector<PovmBasis>& bases,
                                std::uint64_t shots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_counts(rho, bases, shots, rng);
}

MeasurementRecord sample_process(const TomographyDesign& design, const std::vector<Mat>& outputs,
                                 std::uint64_t shots, std::mt19937_64& rng) {
  if (design.mode != TomoMode::QPT || outputs.size() != design.preps.size())
    throw Error(ErrorKind::DimensionMismatch, "one output state per preparation required");
  MeasurementRecord rec;
  for (std::size_t p = 0; p < outputs.size(); ++p)
    for (std::size_t m = 0; m < design.bases.size(); ++m)
      append_setting(rec, static_cast<int>(p), m, born_probabilities(outputs[p], design.bases[m]),
                     shots, rng);
  return rec;
}

StateEstimate reconstruct_qst(const TomographyDesign& design, const MeasurementRecord& record) {
  if (design.mode != TomoMode::QST) throw Error(ErrorKind::InvalidArgument, "expected a QST design");
  const RVec y = data_vector(design, record);
  const Vec x = pseudo_inverse(design.A) * y.cast<cplx>();
  StateEstimate est;
  est.raw = hermitian_part(devectorize(x));
  est.rho = project_state_physical(est.raw);
  est.displacement = (est.rho.matrix() - est.raw).norm();
  est.raw_misfit = misfit(design.A, vectorize(est.raw), y);
  est.misfit = misfit(design.A, vectorize(est.rho.matrix()), y);
  return est;
}

ProcessEstimate reconstruct_qpt(const TomographyDesign& design, const MeasurementRecord& record) {
  if (design.mode != TomoMode::QPT) throw Error(ErrorKind::InvalidArgument, "expected a QPT design");
  const RVec y = data_vector(design, record);
  const Vec x = pseudo_inverse(design.A) * y.cast<cplx>();
  ProcessEstimate est;
  est.raw = hermitian_part(devectorize(x));
  const auto proj = project_choi_cptp({est.raw});
  est.choi = proj.choi;
  est.displacement = proj.displacement;
  est.raw_misfit = misfit(design.A, vectorize(est.raw), y);
  est.misfit = misfit(design.A, vectorize(est.choi.m), y);
  return est;
}

namespace {

void write_entry(std::ostream& os, const TomographyDesign& design, const MeasurementRecord::Entry& e) {
  const auto labels = qpt_preparation_labels();
  const std::size_t n_bits = log2_exact(design.n_outcomes());
  os << (e.prep < 0 ? std::string("-") : labels.at(static_cast<std::size_t>(e.prep))) << ','
     << design.bases.at(e.basis).label << ',' << outcome_label(e.outcome, n_bits) << ',' << e.count
     << ',' << e.shots << ',' << fmt_num(e.p_hat) << '\n';
}

}  // namespace

void write_record_csv(std::ostream& os, const TomographyDesign& design, const MeasurementRecord& record) {
  os << "prep,basis,outcome,count,shots,p_hat\n";
  for (const auto& e : record.entries) write_entry(os, design, e);
}

void write_records_csv(std::ostream& os, const TomographyDesign& design, const std::vector<double>& times,
                       const std::vector<MeasurementRecord>& records) {
  if (times.size() != records.size()) throw Error(ErrorKind::GridMismatch, "one record per time");
  os << "t,prep,basis,outcome,count,shots,p_hat\n";
  for (std::size_t n = 0; n < times.size(); ++n)
    for (const auto& e : records[n].entries) {
      os << fmt_num(times[n]) << ',';
      write_entry(os, design, e);
    }
}

MeasurementRecord read_record_csv(std::istream& is, const TomographyDesign& design) {
  const auto labels = qpt_preparation_labels();
  const std::size_t n_bits = log2_exact(design.n_outcomes());
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::MissingSettings, "empty record file");

  MeasurementRecord rec;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string prep, basis, outcome, count, shots, p_hat;
    std::getline(ss, prep, ',');
    std::getline(ss, basis, ',');
    std::getline(ss, outcome, ',');
    std::getline(ss, count, ',');
    std::getline(ss, shots, ',');
    std::getline(ss, p_hat, ',');

    MeasurementRecord::Entry e;
    if (prep != "-") {
      auto it = std::find(labels.begin(), labels.end(), prep);
      if (it == labels.end()) throw Error(ErrorKind::InvalidArgument, "unknown preparation " + prep);
      e.prep = static_cast<int>(it - labels.begin());
    }
    auto bt = std::find_if(design.bases.begin(), design.bases.end(),
                           [&](const PovmBasis& b) { return b.label == basis; });
    if (bt == design.bases.end()) throw Error(ErrorKind::InvalidArgument, "unknown basis " + basis);
    e.basis = static_cast<std::size_t>(bt - design.bases.begin());
    if (outcome.size() != n_bits) throw Error(ErrorKind::InvalidArgument, "bad outcome " + outcome);
    e.outcome = std::stoull(outcome, nullptr, 2);
    e.count = std::stoull(count);
    e.shots = std::stoull(shots);
    e.p_hat = p_hat.empty() ? (e.shots > 0 ? static_cast<double>(e.count) / static_cast<double>(e.shots) : 0.0)
                            : std::stod(p_hat);
    rec.entries.push_back(e);
  }
  return rec;
}

}  // namespace pmme
