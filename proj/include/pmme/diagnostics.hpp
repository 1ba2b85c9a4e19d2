// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Pointwise non-Markovianity and crosstalk witnesses.

#pragma once

#include <iosfwd>
#include <vector>

#include "pmme/core.hpp"
#include "pmme/io.hpp"

namespace pmme {

struct ChoiSeries {
  std::vector<double> times;
  std::vector<ChoiMatrix> choi;
};

// lambda_min of the intermediate map chi_{t,s} = R^-1(S_t S_s^+) for s <= t.
// Cells with s > t are masked; cells whose S_s has no singular value above the
// cutoff are undefined. Both hold NaN.
struct CPDivMap {
  std::vector<double> times;
  Eigen::MatrixXd lambda_min;  // (t index, s index)
  double tolerance = 1e-7;

  bool masked(std::size_t t_idx, std::size_t s_idx) const { return s_idx > t_idx; }
  bool defined(std::size_t t_idx, std::size_t s_idx) const;
  // Minimum over defined cells; +inf when none.
  double min_value() const;
  bool cp_divisible() const { return min_value() >= -tolerance; }
};

CPDivMap cp_divisibility_map(const ChoiSeries& series, double tolerance = 1e-7);

struct Interval {
  double start = 0.0;
  double end = 0.0;
};

struct BackflowSeries {
  std::vector<double> times;
  std::vector<double> trace_distance;
  std::vector<double> relative_entropy;  // +inf where the support condition fails
  std::vector<double> sigma_trace;       // (T_n - T_{n-1}) / dt, NaN at n = 0
  std::vector<double> sigma_relative;    // same for D, NaN where undefined
  std::vector<bool> flagged;             // either derivative above threshold
  std::vector<Interval> intervals;       // maximal runs of flagged steps
  double threshold = 0.0;

  bool any_flag() const { return !intervals.empty(); }
  // Mean spacing of local maxima of the trace distance, refined by parabolic
  // interpolation; NaN with fewer than two maxima.
  double revival_period() const;
};

BackflowSeries backflow_series(const std::vector<double>& times, const std::vector<Mat>& rho1,
                               const std::vector<Mat>& rho2, double threshold = 1e-9);

struct CrosstalkPoint {
  double t = 0.0;
  EntropyReport metrics;
  bool entangled = false;  // S(A|B) < -tol
};

std::vector<CrosstalkPoint> crosstalk_metrics(const std::vector<double>& times,
                                              const std::vector<Mat>& rho_ab, double tol = 1e-9);

void write_cpdiv_csv(std::ostream& os, const CPDivMap& map);
json cpdiv_to_json(const CPDivMap& map);
void write_backflow_csv(std::ostream& os, const BackflowSeries& series);
void write_crosstalk_csv(std::ostream& os, const std::vector<CrosstalkPoint>& series);

}  // namespace pmme
