// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "pmme/io.hpp"

#include <cmath>
#include <cstdio>

namespace pmme {

std::string fmt_num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json matrix_to_json(const Mat& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  return {{"dim", m.rows()}, {"re", re}, {"im", im}};
}

Mat matrix_from_json(const json& j) {
  const auto d = j.at("dim").get<Eigen::Index>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (d <= 0 || re.size() != static_cast<std::size_t>(d * d) || im.size() != re.size())
    throw Error(ErrorKind::DimensionMismatch, "matrix JSON entries do not match dim");
  Mat m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index k = 0; k < d; ++k) {
      const auto idx = static_cast<std::size_t>(i * d + k);
      m(i, k) = cplx(re[idx].get<double>(), im[idx].get<double>());
    }
  return m;
}

}  // namespace pmme
