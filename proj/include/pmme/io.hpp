// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "pmme/core.hpp"

namespace pmme {

using json = nlohmann::json;

// Shortest round-trippable decimal ("%.17g"); non-finite values print as nan/inf.
std::string fmt_num(double x);

// {dim, re, im}, row-major.
json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j);

}  // namespace pmme
