// Copyright 2026 The pmme-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "pmme/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace pmme {

namespace {

const std::vector<std::string> kLabels{"0", "1", "+", "-", "+i", "-i"};

void require_label(const std::string& label) {
  if (std::find(kLabels.begin(), kLabels.end(), label) == kLabels.end())
    throw Error(ErrorKind::InvalidConfig, "unknown state label '" + label + "'");
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw Error(ErrorKind::InvalidConfig, "unknown key '" + it.key() + "' in " + where);
  }
}

Mat state_from_bloch(const Bloch& b) { return states::from_bloch(b.x, b.y, b.z); }

// Independent stream per (stage, index) derived from the config seed.
std::mt19937_64 stream(const ExperimentConfig& cfg, std::uint32_t stage, std::uint32_t index) {
  const std::uint64_t seed = cfg.shots > 0 ? cfg.require_seed() : cfg.seed.value_or(0);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stage, index};
  return std::mt19937_64(seq);
}

enum StreamId : std::uint32_t { kStreamQst = 1, kStreamPair = 2, kStreamQpt = 3 };

std::uint32_t label_index(const std::string& label) {
  return static_cast<std::uint32_t>(std::find(kLabels.begin(), kLabels.end(), label) - kLabels.begin());
}

}  // namespace

// ---------------------------------------------------------------- config

double ExperimentConfig::cpdiv_tolerance() const {
  return tol.cpdiv.value_or(shots > 0 ? 0.01 : 1e-7);
}

double ExperimentConfig::backflow_threshold() const {
  if (tol.backflow) return *tol.backflow;
  if (shots == 0) return 1e-9;
  // trace-distance noise per point ~ 1/sqrt(shots); difference of two points over dt
  return 3.0 * std::sqrt(2.0 / static_cast<double>(shots)) / grid.dt;
}

double ExperimentConfig::crosstalk_tolerance() const { return tol.crosstalk.value_or(1e-9); }

std::uint64_t ExperimentConfig::require_seed() const {
  if (!seed) throw Error(ErrorKind::InvalidConfig, "a seed is required when shots > 0");
  return *seed;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    reject_unknown(j, {"model", "states", "backflow_pairs", "grid", "shots", "seed", "output", "tolerances", "fit", "kernel"},
                   "config");
    const json& m = j.at("model");
    const std::string type = m.at("type").get<std::string>();
    if (type == "zz") {
      json body = m;
      body.erase("type");
      c.model = ZZModel::from_json(body);
    } else if (type == "lindblad") {
      reject_unknown(m, {"type", "omega_z", "gamma_ad", "gamma_pd"}, "model");
      LindbladParams p{m.at("omega_z").get<double>(), m.at("gamma_ad").get<double>(), m.at("gamma_pd").get<double>()};
      p.validate();
      c.model = p;
    } else {
      throw Error(ErrorKind::InvalidConfig, "model.type must be 'zz' or 'lindblad'");
    }

    if (j.contains("states")) {
      const json& s = j.at("states");
      reject_unknown(s, {"main", "spectator"}, "states");
      c.main_states = get_or(s, "main", c.main_states);
      c.spectator_state = get_or(s, "spectator", c.spectator_state);
    }
    if (j.contains("backflow_pairs")) {
      c.backflow_pairs.clear();
      for (const auto& p : j.at("backflow_pairs")) {
        if (!p.is_array() || p.size() != 2) throw Error(ErrorKind::InvalidConfig, "backflow pairs are [a, b]");
        c.backflow_pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
      }
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      reject_unknown(g, {"n", "dt", "gate_duration_ns", "gates_per_step"}, "grid");
      c.grid.n = get_or<std::size_t>(g, "n", c.grid.n);
      if (g.contains("dt")) {
        c.grid.dt = g.at("dt").get<double>();
      } else if (g.contains("gate_duration_ns") || g.contains("gates_per_step")) {
        c.grid.dt = get_or(g, "gate_duration_ns", 56.0) * get_or(g, "gates_per_step", 50.0) / 1000.0;
      }
    }
    c.shots = get_or<std::uint64_t>(j, "shots", 0);
    if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
    c.output = get_or<std::string>(j, "output", "out");
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      reject_unknown(t, {"cpdiv", "backflow", "crosstalk"}, "tolerances");
      if (t.contains("cpdiv")) c.tol.cpdiv = t.at("cpdiv").get<double>();
      if (t.contains("backflow")) c.tol.backflow = t.at("backflow").get<double>();
      if (t.contains("crosstalk")) c.tol.crosstalk = t.at("crosstalk").get<double>();
    }
    if (j.contains("fit")) {
      const json& f = j.at("fit");
      reject_unknown(f, {"guess", "starts"}, "fit");
      if (f.contains("guess")) {
        const json& g = f.at("guess");
        c.fit_guess = {g.at("omega_z").get<double>(), g.at("gamma_ad").get<double>(), g.at("gamma_pd").get<double>()};
        c.fit_guess.validate();
      }
      c.fit_starts = get_or<std::size_t>(f, "starts", c.fit_starts);
    }
    if (j.contains("kernel")) {
      const json& k = j.at("kernel");
      reject_unknown(k, {"evaluation", "hann", "sigma", "cutoff_rel", "low_confidence_fraction"}, "kernel");
      const std::string ev = get_or<std::string>(k, "evaluation", "matched");
      if (ev != "matched" && ev != "literal") throw Error(ErrorKind::InvalidConfig, "kernel.evaluation");
      c.kernel.evaluation = ev == "literal" ? SEvaluation::Literal : SEvaluation::Matched;
      c.kernel.hann = get_or(k, "hann", false);
      c.kernel.cutoff_rel = get_or(k, "cutoff_rel", c.kernel.cutoff_rel);
      c.kernel.low_confidence_fraction = get_or(k, "low_confidence_fraction", c.kernel.low_confidence_fraction);
      c.sigma = get_or(k, "sigma", 0.0);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidConfig) throw;
    throw Error(ErrorKind::InvalidConfig, e.what());
  }

  if (c.main_states.empty()) throw Error(ErrorKind::InvalidConfig, "states.main is empty");
  for (const auto& s : c.main_states) require_label(s);
  require_label(c.spectator_state);
  for (const auto& [a, b] : c.backflow_pairs) {
    require_label(a);
    require_label(b);
  }
  if (c.grid.n < 10) throw Error(ErrorKind::InvalidConfig, "grid.n must be at least 10");
  if (!(c.grid.dt > 0.0)) throw Error(ErrorKind::InvalidConfig, "grid.dt must be positive");
  if (c.fit_starts == 0) throw Error(ErrorKind::InvalidConfig, "fit.starts must be positive");
  if (!(c.kernel.low_confidence_fraction >= 0.0 && c.kernel.low_confidence_fraction < 1.0))
    throw Error(ErrorKind::InvalidConfig, "kernel.low_confidence_fraction must be in [0, 1)");
  if (c.shots > 0) c.require_seed();
  return c;
}

json ExperimentConfig::to_json() const {
  json model_json;
  if (is_zz()) {
    model_json = std::get<ZZModel>(model).to_json();
    model_json["type"] = "zz";
  } else {
    const auto& p = std::get<LindbladParams>(model);
    model_json = {{"type", "lindblad"}, {"omega_z", p.omega_z}, {"gamma_ad", p.gamma_ad}, {"gamma_pd", p.gamma_pd}};
  }
  json pairs = json::array();
  for (const auto& [a, b] : backflow_pairs) pairs.push_back({a, b});
  json tols = json::object();
  if (tol.cpdiv) tols["cpdiv"] = *tol.cpdiv;
  if (tol.backflow) tols["backflow"] = *tol.backflow;
  if (tol.crosstalk) tols["crosstalk"] = *tol.crosstalk;
  return {{"model", model_json},
          {"states", {{"main", main_states}, {"spectator", spectator_state}}},
          {"backflow_pairs", pairs},
          {"grid", {{"n", grid.n}, {"dt", grid.dt}}},
          {"shots", shots},
          {"seed", seed ? json(*seed) : json(nullptr)},
          {"output", output.string()},
          {"tolerances", tols},
          {"fit",
           {{"guess", {{"omega_z", fit_guess.omega_z}, {"gamma_ad", fit_guess.gamma_ad}, {"gamma_pd", fit_guess.gamma_pd}}},
            {"starts", fit_starts}}},
          {"kernel",
           {{"evaluation", kernel.evaluation == SEvaluation::Literal ? "literal" : "matched"},
            {"hann", kernel.hann},
            {"sigma", sigma},
            {"cutoff_rel", kernel.cutoff_rel},
            {"low_confidence_fraction", kernel.low_confidence_fraction}}}};
}

std::string ExperimentConfig::hash() const {
  json doc = to_json();
  doc.erase("output");  // where results land is not part of the experiment
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, path.string() + ": " + e.what());
  }
  return ExperimentConfig::from_json(j);
}

Bloch bloch_for_label(const std::string& label) {
  if (label == "0") return {0, 0, 1};
  if (label == "1") return {0, 0, -1};
  if (label == "+") return {1, 0, 0};
  if (label == "-") return {-1, 0, 0};
  if (label == "+i") return {0, 1, 0};
  if (label == "-i") return {0, -1, 0};
  throw Error(ErrorKind::InvalidConfig, "unknown state label '" + label + "'");
}

std::string file_label(const std::string& label) {
  if (label == "+") return "plus";
  if (label == "-") return "minus";
  if (label == "+i") return "plus_i";
  if (label == "-i") return "minus_i";
  return label;
}

BlochTrajectory StateSeries::bloch() const {
  BlochTrajectory tr;
  for (std::size_t n = 0; n < times.size(); ++n) tr.push(times[n], bloch_of(states[n]));
  return tr;
}

// ---------------------------------------------------------------- stages

StateSeries simulate_main(const ExperimentConfig& cfg, const std::string& label) {
  StateSeries out{label, cfg.times(), {}};
  const Bloch b0 = bloch_for_label(label);
  if (cfg.is_zz()) {
    const auto& m = std::get<ZZModel>(cfg.model);
    ProductState init;
    init.qubits.push_back(b0);
    for (std::size_t q = 0; q < m.n_spectators; ++q) init.qubits.push_back(bloch_for_label(cfg.spectator_state));
    const BlochTrajectory tr = closed_form_bloch(m, init, out.times);
    for (std::size_t n = 0; n < tr.size(); ++n) out.states.push_back(states::from_bloch(tr.vx[n], tr.vy[n], tr.vz[n]));
  } else {
    const DampingBasis basis(std::get<LindbladParams>(cfg.model));
    const Mat rho0 = state_from_bloch(b0);
    for (double t : out.times) out.states.push_back(propagate(basis, rho0, t));
  }
  return out;
}

StateSeries simulate_pair(const ExperimentConfig& cfg, const std::string& label) {
  StateSeries out{label, cfg.times(), {}};
  const Mat main0 = state_from_bloch(bloch_for_label(label));
  const Mat spec0 = state_from_bloch(bloch_for_label(cfg.spectator_state));
  if (cfg.is_zz()) {
    const auto& m = std::get<ZZModel>(cfg.model);
    if (m.n_spectators == 0) throw Error(ErrorKind::InvalidConfig, "crosstalk needs at least one spectator");
    Mat init = main0;
    for (std::size_t q = 0; q < m.n_spectators; ++q) init = kron(init, spec0);
    const auto res = brute_force_evolve(m, init, out.times, true);
    for (const auto& rho : res.states) out.states.push_back(reduce_qubits(rho, m.n_spectators + 1, {0, 1}));
  } else {
    const DampingBasis basis(std::get<LindbladParams>(cfg.model));
    for (double t : out.times) out.states.push_back(kron(propagate(basis, main0, t), propagate(basis, spec0, t)));
  }
  return out;
}

namespace {

QstRun run_qst(const ExperimentConfig& cfg, const StateSeries& truth, std::size_t dim, std::mt19937_64 rng) {
  const TomographyDesign design = build_design(TomoMode::QST, dim);
  QstRun run;
  run.estimate.label = truth.label;
  run.estimate.times = truth.times;
  for (const auto& rho : truth.states) {
    run.records.push_back(sample_counts(rho, design.bases, cfg.shots, rng));
    run.estimate.states.push_back(reconstruct_qst(design, run.records.back()).rho.matrix());
  }
  return run;
}

FitResult fit_series(const ExperimentConfig& cfg, const StateSeries& measured) {
  FitOptions opt;
  opt.n_starts = cfg.fit_starts;
  opt.initial = bloch_for_label(measured.label);
  if (cfg.seed) opt.seed = *cfg.seed;
  return fit_parameters(measured.bloch(), cfg.fit_guess, opt);
}

KernelRun kernel_series(const ExperimentConfig& cfg, const StateSeries& measured, const FitResult& fit) {
  KernelRun run;
  run.fit = fit;
  const DampingBasis basis(run.fit.params);
  run.coefficients = expand_coefficients(basis, measured.times, measured.states);
  run.kernel = reconstruct_kernel(run.coefficients, basis, LaplaceGrid::make(cfg.grid.n, cfg.grid.dt, cfg.sigma),
                                  cfg.kernel);
  return run;
}

}  // namespace

QstRun tomography_main(const ExperimentConfig& cfg, const std::string& label) {
  return run_qst(cfg, simulate_main(cfg, label), 2, stream(cfg, kStreamQst, label_index(label)));
}

QstRun tomography_pair(const ExperimentConfig& cfg, const std::string& label) {
  return run_qst(cfg, simulate_pair(cfg, label), 4, stream(cfg, kStreamPair, label_index(label)));
}

QptRun tomography_process(const ExperimentConfig& cfg) {
  const TomographyDesign design = build_design(TomoMode::QPT, 2);
  std::vector<StateSeries> outputs;
  for (const auto& label : qpt_preparation_labels()) outputs.push_back(simulate_main(cfg, label));
  auto rng = stream(cfg, kStreamQpt, 0);

  QptRun run;
  run.choi.times = cfg.times();
  for (std::size_t n = 0; n < run.choi.times.size(); ++n) {
    std::vector<Mat> at_t;
    for (const auto& o : outputs) at_t.push_back(o.states[n]);
    run.records.push_back(sample_process(design, at_t, cfg.shots, rng));
    const ProcessEstimate est = reconstruct_qpt(design, run.records.back());
    run.choi.choi.push_back(est.choi);
    run.max_displacement = std::max(run.max_displacement, est.displacement);
  }
  return run;
}

FitResult fit_state(const ExperimentConfig& cfg, const std::string& label) {
  return fit_series(cfg, tomography_main(cfg, label).estimate);
}

KernelRun kernel_state(const ExperimentConfig& cfg, const std::string& label) {
  const StateSeries measured = tomography_main(cfg, label).estimate;
  return kernel_series(cfg, measured, fit_series(cfg, measured));
}

// ---------------------------------------------------------------- command runner

const std::vector<std::string>& pipeline_commands() {
  static const std::vector<std::string> cmds{"simulate", "tomo", "cpdiv", "backflow", "crosstalk", "fit", "kernel", "report"};
  return cmds;
}

namespace {

class Writer {
 public:
  explicit Writer(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& stage, const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write " + path.string());
    written_.push_back(path);
    out << content;
    if (!out) throw Error(ErrorKind::InvalidConfig, "write failed for " + path.string());
    artifacts_.push_back({stage, name});
  }

  void remove_all() noexcept {
    std::error_code ec;
    for (const auto& p : written_) std::filesystem::remove(p, ec);
  }

  const std::vector<Artifact>& artifacts() const { return artifacts_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
  std::vector<Artifact> artifacts_;
};

template <class F>
std::string to_text(F&& fill) {
  std::ostringstream os;
  fill(os);
  return os.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json states_json(const StateSeries& s) {
  json arr = json::array();
  for (std::size_t n = 0; n < s.times.size(); ++n) arr.push_back({{"t", s.times[n]}, {"rho", matrix_to_json(s.states[n])}});
  return {{"label", s.label}, {"states", arr}};
}

// Caches per-label tomography so `report` reconstructs every dataset once.
class Session {
 public:
  explicit Session(const ExperimentConfig& cfg) : cfg_(cfg) {}

  const QstRun& qst(const std::string& label) {
    auto it = qst_.find(label);
    if (it == qst_.end()) it = qst_.emplace(label, tomography_main(cfg_, label)).first;
    return it->second;
  }

  const FitResult& fit(const std::string& label) {
    auto it = fit_.find(label);
    if (it == fit_.end()) it = fit_.emplace(label, fit_series(cfg_, qst(label).estimate)).first;
    return it->second;
  }

  const KernelRun& kernel(const std::string& label) {
    auto it = kernel_.find(label);
    if (it == kernel_.end()) it = kernel_.emplace(label, kernel_series(cfg_, qst(label).estimate, fit(label))).first;
    return it->second;
  }

 private:
  const ExperimentConfig& cfg_;
  std::map<std::string, QstRun> qst_;
  std::map<std::string, FitResult> fit_;
  std::map<std::string, KernelRun> kernel_;
};

void stage_simulate(const ExperimentConfig& cfg, Writer& w, json&) {
  for (const auto& label : cfg.main_states) {
    const auto series = simulate_main(cfg, label);
    w.write("simulate", "trajectory_" + file_label(label) + ".csv",
            to_text([&](std::ostream& os) { write_trajectory_csv(os, series.bloch()); }));
  }
}

void stage_tomo(const ExperimentConfig& cfg, Session& s, Writer& w, json& summary) {
  const TomographyDesign qst = build_design(TomoMode::QST, 2);
  for (const auto& label : cfg.main_states) {
    const QstRun& run = s.qst(label);
    const std::string fl = file_label(label);
    w.write("tomo", "records_" + fl + ".csv",
            to_text([&](std::ostream& os) { write_records_csv(os, qst, run.estimate.times, run.records); }));
    w.write("tomo", "measured_" + fl + ".csv",
            to_text([&](std::ostream& os) { write_trajectory_csv(os, run.estimate.bloch()); }));
    w.write("tomo", "states_" + fl + ".json", dump(states_json(run.estimate)));
  }
  const QptRun qpt = tomography_process(cfg);
  const TomographyDesign qpt_design = build_design(TomoMode::QPT, 2);
  w.write("tomo", "qpt_records.csv",
          to_text([&](std::ostream& os) { write_records_csv(os, qpt_design, qpt.choi.times, qpt.records); }));
  json chis = json::array();
  for (std::size_t n = 0; n < qpt.choi.times.size(); ++n)
    chis.push_back({{"t", qpt.choi.times[n]}, {"choi", matrix_to_json(qpt.choi.choi[n].m)}});
  w.write("tomo", "choi_series.json", dump({{"series", chis}, {"max_projection_displacement", qpt.max_displacement}}));
  summary["tomo"] = {{"max_projection_displacement", qpt.max_displacement}};
}

void stage_cpdiv(const ExperimentConfig& cfg, Writer& w, json& summary) {
  const CPDivMap map = cp_divisibility_map(tomography_process(cfg).choi, cfg.cpdiv_tolerance());
  w.write("cpdiv", "cpdiv.csv", to_text([&](std::ostream& os) { write_cpdiv_csv(os, map); }));
  const json j = cpdiv_to_json(map);
  w.write("cpdiv", "cpdiv.json", dump(j));
  summary["cpdiv"] = {{"min", j.at("min")}, {"cp_divisible", j.at("cp_divisible")}, {"tolerance", map.tolerance}};
}

void stage_backflow(const ExperimentConfig& cfg, Session& s, Writer& w, json& summary) {
  json out = json::array();
  for (const auto& [a, b] : cfg.backflow_pairs) {
    const auto& ra = s.qst(a).estimate;
    const auto& rb = s.qst(b).estimate;
    const BackflowSeries bf = backflow_series(ra.times, ra.states, rb.states, cfg.backflow_threshold());
    w.write("backflow", "backflow_" + file_label(a) + "_" + file_label(b) + ".csv",
            to_text([&](std::ostream& os) { write_backflow_csv(os, bf); }));
    json iv = json::array();
    for (const auto& i : bf.intervals) iv.push_back({i.start, i.end});
    const double period = bf.revival_period();
    out.push_back({{"pair", {a, b}},
                   {"intervals", iv},
                   {"revival_period", std::isfinite(period) ? json(period) : json(nullptr)},
                   {"threshold", bf.threshold}});
  }
  summary["backflow"] = out;
}

void stage_crosstalk(const ExperimentConfig& cfg, Writer& w, json& summary) {
  const std::string& label = cfg.main_states.front();
  const QstRun run = tomography_pair(cfg, label);
  const auto metrics = crosstalk_metrics(run.estimate.times, run.estimate.states, cfg.crosstalk_tolerance());
  w.write("crosstalk", "crosstalk.csv", to_text([&](std::ostream& os) { write_crosstalk_csv(os, metrics); }));
  double max_mi = 0.0;
  double min_cond = 1.0;
  bool entangled = false;
  for (const auto& p : metrics) {
    max_mi = std::max(max_mi, p.metrics.mutual_information);
    min_cond = std::min(min_cond, p.metrics.conditional_entropy);
    entangled = entangled || p.entangled;
  }
  summary["crosstalk"] = {{"main_state", label},
                          {"max_mutual_information", max_mi},
                          {"min_conditional_entropy", min_cond},
                          {"entangled", entangled}};
}

void stage_fit(const ExperimentConfig& cfg, Session& s, Writer& w, json& summary) {
  json fits = json::object();
  for (const auto& label : cfg.main_states) {
    const FitResult& fit = s.fit(label);
    w.write("fit", "fit_" + file_label(label) + ".json", dump(fit.to_json()));
    fits[label] = fit.to_json();
  }
  summary["fit"] = fits;
}

void stage_kernel(const ExperimentConfig& cfg, Session& s, Writer& w, json& summary) {
  json kernels = json::object();
  for (const auto& label : cfg.main_states) {
    const std::string fl = file_label(label);
    json entry = json::object();
    try {
      const KernelRun& run = s.kernel(label);
      w.write("kernel", "kernel_" + fl + ".csv", to_text([&](std::ostream& os) { write_kernel_csv(os, run.kernel); }));
      w.write("kernel", "coefficients_" + fl + ".csv",
              to_text([&](std::ostream& os) { write_coefficients_csv(os, run.coefficients); }));
      const ModeKernel& mk = run.kernel.modes.front();
      const auto trusted = static_cast<std::size_t>(
          std::count(run.kernel.low_confidence.begin(), run.kernel.low_confidence.end(), false));
      entry["mode"] = mk.mode;
      entry["dominant_frequency"] = dominant_frequency(mk.k, run.kernel.grid.dt, 1, trusted);
    } catch (const Error& e) {
      // Eigenstates of Z carry no coherence; they are reported, not fatal.
      if (e.kind() != ErrorKind::NoKernelInformation && e.kind() != ErrorKind::ModeUnexcited) throw;
      entry["skipped"] = e.what();
    }
    kernels[label] = entry;
  }
  summary["kernel"] = kernels;
}

}  // namespace

std::vector<Artifact> run_command(const std::string& command, const ExperimentConfig& cfg) {
  const auto& cmds = pipeline_commands();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
    throw Error(ErrorKind::InvalidConfig, "unknown command '" + command + "'");

  std::error_code ec;
  std::filesystem::create_directories(cfg.output, ec);
  if (ec) throw Error(ErrorKind::InvalidConfig, "cannot create " + cfg.output.string() + ": " + ec.message());

  Writer w(cfg.output);
  try {
    Session session(cfg);
    json summary = json::object();
    const bool all = command == "report";
    if (all || command == "simulate") stage_simulate(cfg, w, summary);
    if (all || command == "tomo") stage_tomo(cfg, session, w, summary);
    if (all || command == "cpdiv") stage_cpdiv(cfg, w, summary);
    if (all || command == "backflow") stage_backflow(cfg, session, w, summary);
    if (all || command == "crosstalk") stage_crosstalk(cfg, w, summary);
    if (all || command == "fit") stage_fit(cfg, session, w, summary);
    if (all || command == "kernel") stage_kernel(cfg, session, w, summary);
    if (all) w.write("report", "report.json", dump(summary));

    json arts = json::array();
    for (const auto& a : w.artifacts()) arts.push_back({{"stage", a.stage}, {"file", a.file}});
    const json manifest = {{"tool", "pmme"},
                           {"version", kVersion},
                           {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                         "." + std::to_string(EIGEN_MINOR_VERSION)},
                           {"command", command},
                           {"config_hash", cfg.hash()},
                           {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)},
                           {"shots", cfg.shots},
                           {"config", cfg.to_json()},
                           {"artifacts", arts}};
    w.write("manifest", "manifest.json", dump(manifest));
  } catch (...) {
    w.remove_all();
    throw;
  }
  return w.artifacts();
}

}  // namespace pmme
