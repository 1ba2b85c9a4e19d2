// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Config-driven experiment: simulate -> tomography -> diagnostics -> fit -> kernel.
// Every stage is a pure function of the config; stochastic stages draw from
// streams keyed by (seed, stage, state) so stages can be rerun independently.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pmme/diagnostics.hpp"
#include "pmme/fit.hpp"
#include "pmme/io.hpp"
#include "pmme/kernel.hpp"
#include "pmme/lindblad.hpp"
#include "pmme/tomography.hpp"
#include "pmme/zz.hpp"

namespace pmme {

inline constexpr const char* kVersion = "0.3.0";

struct GridConfig {
  std::size_t n = 50;
  double dt = 2.8;  // us; 50 identity gates of 56 ns
};

struct Tolerances {
  std::optional<double> cpdiv;      // default 1e-7 noiseless, 0.01 with shots
  std::optional<double> backflow;   // default 1e-9 noiseless, 3 sigma of shot noise otherwise
  std::optional<double> crosstalk;  // default 1e-9
};

struct ExperimentConfig {
  std::variant<ZZModel, LindbladParams> model;
  std::vector<std::string> main_states{"+", "-", "+i", "-i"};
  std::string spectator_state = "+";
  std::vector<std::pair<std::string, std::string>> backflow_pairs{{"+", "-"}, {"+i", "-i"}};
  GridConfig grid;
  std::uint64_t shots = 0;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output = "out";
  Tolerances tol;
  LindbladParams fit_guess{1.0, 0.01, 0.01};
  std::size_t fit_starts = 5;
  KernelOptions kernel;
  double sigma = 0.0;  // <= 0 selects 1/(3 T_max)

  bool is_zz() const { return std::holds_alternative<ZZModel>(model); }
  std::vector<double> times() const { return uniform_grid(grid.n, grid.dt); }
  double cpdiv_tolerance() const;
  double backflow_threshold() const;
  double crosstalk_tolerance() const;
  std::uint64_t require_seed() const;

  // Throws InvalidConfig on malformed documents.
  static ExperimentConfig from_json(const json& j);
  json to_json() const;
  // 64-bit FNV-1a of the canonical JSON dump without `output`, as 16 hex digits.
  std::string hash() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);

// Single-qubit preparation labels: "0", "1", "+", "-", "+i", "-i".
Bloch bloch_for_label(const std::string& label);
// File-name safe form: "+" -> "plus", "-i" -> "minus_i", ...
std::string file_label(const std::string& label);

struct StateSeries {
  std::string label;
  std::vector<double> times;
  std::vector<Mat> states;

  BlochTrajectory bloch() const;
};

// Exact main-qubit states for one preparation.
StateSeries simulate_main(const ExperimentConfig& cfg, const std::string& label);
// Exact two-qubit (main, first spectator) states, main prepared in `label`.
StateSeries simulate_pair(const ExperimentConfig& cfg, const std::string& label);

struct QstRun {
  StateSeries estimate;
  std::vector<MeasurementRecord> records;
};
QstRun tomography_main(const ExperimentConfig& cfg, const std::string& label);
QstRun tomography_pair(const ExperimentConfig& cfg, const std::string& label);

struct QptRun {
  ChoiSeries choi;
  std::vector<MeasurementRecord> records;
  double max_displacement = 0.0;
};
QptRun tomography_process(const ExperimentConfig& cfg);

FitResult fit_state(const ExperimentConfig& cfg, const std::string& label);

struct KernelRun {
  FitResult fit;
  CoefficientSeries coefficients;
  KernelEstimate kernel;
};
KernelRun kernel_state(const ExperimentConfig& cfg, const std::string& label);

struct Artifact {
  std::string stage;
  std::string file;
};

// Runs one of simulate, tomo, cpdiv, backflow, crosstalk, fit, kernel, report.
// Writes the stage outputs and manifest.json into cfg.output and returns the
// artifact list. On failure every file written by this call is removed.
std::vector<Artifact> run_command(const std::string& command, const ExperimentConfig& cfg);

const std::vector<std::string>& pipeline_commands();

}  // namespace pmme
