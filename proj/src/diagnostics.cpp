// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "pmme/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace pmme {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

bool CPDivMap::defined(std::size_t t_idx, std::size_t s_idx) const {
  return !masked(t_idx, s_idx) &&
         !std::isnan(lambda_min(static_cast<Eigen::Index>(t_idx), static_cast<Eigen::Index>(s_idx)));
}

double CPDivMap::min_value() const {
  double m = kInf;
  for (std::size_t t = 0; t < times.size(); ++t)
    for (std::size_t s = 0; s <= t; ++s)
      if (defined(t, s)) m = std::min(m, lambda_min(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)));
  return m;
}

CPDivMap cp_divisibility_map(const ChoiSeries& series, double tolerance) {
  const std::size_t n = series.times.size();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "CP-divisibility needs at least two times");
  if (series.choi.size() != n) throw Error(ErrorKind::GridMismatch, "one Choi matrix per time");

  std::vector<Mat> s_mat(n);
  std::vector<Mat> s_pinv(n);
  std::vector<bool> invertible(n);
  for (std::size_t i = 0; i < n; ++i) {
    s_mat[i] = reshuffle(series.choi[i]).m;
    invertible[i] = numerical_rank(s_mat[i]) > 0;
    if (invertible[i]) s_pinv[i] = pseudo_inverse(s_mat[i]);
  }

  CPDivMap map;
  map.times = series.times;
  map.tolerance = tolerance;
  map.lambda_min = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), kNaN);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t s = 0; s <= t; ++s) {
      if (!invertible[s]) continue;
      const ChoiMatrix inter = reshuffle_inverse({s_mat[t] * s_pinv[s]});
      map.lambda_min(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) = min_eigenvalue(inter.m);
    }
  return map;
}

BackflowSeries backflow_series(const std::vector<double>& times, const std::vector<Mat>& rho1,
                               const std::vector<Mat>& rho2, double threshold) {
  if (rho1.size() != times.size() || rho2.size() != times.size())
    throw Error(ErrorKind::GridMismatch, "state series and time grid differ in length");

  BackflowSeries b;
  b.times = times;
  b.threshold = threshold;
  const std::size_t n = times.size();
  for (std::size_t i = 0; i < n; ++i) {
    b.trace_distance.push_back(trace_distance(rho1[i], rho2[i]));
    double d = kInf;
    try {
      d = relative_entropy(rho1[i], rho2[i]);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InfiniteDivergence) throw;
    }
    b.relative_entropy.push_back(d);
  }

  b.sigma_trace.assign(n, kNaN);
  b.sigma_relative.assign(n, kNaN);
  b.flagged.assign(n, false);
  for (std::size_t i = 1; i < n; ++i) {
    const double dt = times[i] - times[i - 1];
    if (!(dt > 0.0)) throw Error(ErrorKind::GridMismatch, "time grid must be increasing");
    b.sigma_trace[i] = (b.trace_distance[i] - b.trace_distance[i - 1]) / dt;
    if (std::isfinite(b.relative_entropy[i]) && std::isfinite(b.relative_entropy[i - 1]))
      b.sigma_relative[i] = (b.relative_entropy[i] - b.relative_entropy[i - 1]) / dt;
    b.flagged[i] = b.sigma_trace[i] > threshold ||
                   (!std::isnan(b.sigma_relative[i]) && b.sigma_relative[i] > threshold);
  }

  for (std::size_t i = 1; i < n; ++i) {
    if (!b.flagged[i]) continue;
    Interval iv{times[i - 1], times[i]};
    while (i + 1 < n && b.flagged[i + 1]) iv.end = times[++i];
    b.intervals.push_back(iv);
  }
  return b;
}

double BackflowSeries::revival_period() const {
  const auto& y = trace_distance;
  std::vector<double> peaks;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
    const double h = times[i + 1] - times[i];
    const double curv = y[i - 1] - 2.0 * y[i] + y[i + 1];
    const double shift = curv != 0.0 ? 0.5 * (y[i - 1] - y[i + 1]) / curv : 0.0;
    peaks.push_back(times[i] + std::clamp(shift, -0.5, 0.5) * h);
  }
  if (peaks.size() < 2) return kNaN;
  return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

std::vector<CrosstalkPoint> crosstalk_metrics(const std::vector<double>& times,
                                              const std::vector<Mat>& rho_ab, double tol) {
  if (times.size() != rho_ab.size()) throw Error(ErrorKind::GridMismatch, "one state per time");
  std::vector<CrosstalkPoint> out;
  out.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    CrosstalkPoint p;
    p.t = times[i];
    p.metrics = entropies(rho_ab[i]);
    p.entangled = p.metrics.conditional_entropy < -tol;
    out.push_back(p);
  }
  return out;
}

void write_cpdiv_csv(std::ostream& os, const CPDivMap& map) {
  os << "s,t,lambda_min\n";
  for (std::size_t t = 0; t < map.times.size(); ++t)
    for (std::size_t s = 0; s <= t; ++s)
      os << fmt_num(map.times[s]) << ',' << fmt_num(map.times[t]) << ','
         << fmt_num(map.lambda_min(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s))) << '\n';
}

json cpdiv_to_json(const CPDivMap& map) {
  json rows = json::array();
  for (std::size_t t = 0; t < map.times.size(); ++t) {
    json row = json::array();
    for (std::size_t s = 0; s < map.times.size(); ++s) {
      if (map.defined(t, s))
        row.push_back(map.lambda_min(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)));
      else
        row.push_back(nullptr);
    }
    rows.push_back(row);
  }
  const double m = map.min_value();
  return {{"times", map.times},
          {"lambda_min", rows},
          {"tolerance", map.tolerance},
          {"min", std::isfinite(m) ? json(m) : json(nullptr)},
          {"cp_divisible", map.cp_divisible()}};
}

void write_backflow_csv(std::ostream& os, const BackflowSeries& b) {
  os << "t,trace_distance,relative_entropy,sigma_trace,sigma_relative,flag\n";
  for (std::size_t i = 0; i < b.times.size(); ++i)
    os << fmt_num(b.times[i]) << ',' << fmt_num(b.trace_distance[i]) << ','
       << fmt_num(b.relative_entropy[i]) << ',' << fmt_num(b.sigma_trace[i]) << ','
       << fmt_num(b.sigma_relative[i]) << ',' << (b.flagged[i] ? 1 : 0) << '\n';
}

void write_crosstalk_csv(std::ostream& os, const std::vector<CrosstalkPoint>& series) {
  os << "t,mutual_information,conditional_entropy,s_a,s_b,s_ab,purity,entangled\n";
  for (const auto& p : series)
    os << fmt_num(p.t) << ',' << fmt_num(p.metrics.mutual_information) << ','
       << fmt_num(p.metrics.conditional_entropy) << ',' << fmt_num(p.metrics.s_a) << ','
       << fmt_num(p.metrics.s_b) << ',' << fmt_num(p.metrics.s_ab) << ',' << fmt_num(p.metrics.purity)
       << ',' << (p.entangled ? 1 : 0) << '\n';
}

}  // namespace pmme
