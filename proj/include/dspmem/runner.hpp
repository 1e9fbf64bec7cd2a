#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "dspmem/config.hpp"

namespace dspmem {

/// Record of everything one invocation emitted.  Numerical payloads are
/// deterministic for identical configs; only wall_seconds varies.
struct RunManifest {
  std::string config_hash;
  std::string version = kVersion;
  std::string kind;
  double wall_seconds = 0.0;
  bool passed = true;
  std::vector<std::pair<std::string, std::string>> status;  // run name -> pass/fail/report
  std::vector<std::string> files;                           // relative to the output dir
  std::string headline_name;                                // metric a sweep would tabulate
  double headline = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["config_hash"] = config_hash;
    j["version"] = version;
    j["kind"] = kind;
    j["wall_seconds"] = wall_seconds;
    j["passed"] = passed;
    nlohmann::json st = nlohmann::json::object();
    for (const auto& [name, s] : status) st[name] = s;
    j["status"] = st;
    j["files"] = files;
    j["headline"] = {{"name", headline_name}, {"value", headline}};
    return j;
  }
};

namespace detail {

inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string full_precision(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_file(RunManifest& manifest, const std::filesystem::path& dir,
                       const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  out << content;
  manifest.files.push_back(name);
}

inline std::string matrix_csv(const Eigen::MatrixXcd& m) {
  std::ostringstream os;
  os << "row,col,re,im\n";
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      os << r << ',' << c << ',' << full_precision(m(r, c).real()) << ','
         << full_precision(m(r, c).imag()) << '\n';
  return os.str();
}

inline std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  const bool with_dark = traj.p_dark.size() == traj.times.size();
  os << "t,norm,n_ph,n_A,n_C" << (with_dark ? ",P_dark" : "") << '\n';
  for (size_t i = 0; i < traj.times.size(); ++i) {
    os << full_precision(traj.times[i]) << ',' << full_precision(traj.norms[i]) << ','
       << full_precision(traj.pop_ph[i]) << ',' << full_precision(traj.pop_a[i]) << ','
       << full_precision(traj.pop_c[i]);
    if (with_dark) os << ',' << full_precision(traj.p_dark[i]);
    os << '\n';
  }
  return os.str();
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// --- experiment bodies ------------------------------------------------------

inline void run_commutators(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                            RunManifest& manifest) {
  constexpr double tol = 1e-12;
  nlohmann::json report;
  report["flavor"] = cfg.flavor == Flavor::Bosonic ? "bosonic" : "dicke";
  report["atoms"] = cfg.model.atoms;
  report["tolerance"] = tol;
  double worst = 0.0;
  nlohmann::json sectors = nlohmann::json::array();
  for (int m = 0; m <= cfg.m_max; ++m) {
    CommutatorReport rep = commutator_report(cfg.flavor, cfg.model, m);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rep.rows) {
      rows.push_back({{"relation", r.relation}, {"deviation", r.deviation}, {"exact", r.exact}});
      if (r.exact) worst = std::max(worst, r.deviation);
    }
    sectors.push_back({{"sector", m}, {"relations", rows}});
  }
  report["sectors"] = sectors;
  report["max_exact_deviation"] = worst;
  const bool ok = worst < tol;
  report["pass"] = ok;
  write_file(manifest, dir, "commutators.json", dump(report));
  manifest.status.emplace_back("commutators", ok ? "pass" : "fail");
  manifest.passed = manifest.passed && ok;
  manifest.headline_name = "max_exact_deviation";
  manifest.headline = worst;
}

inline void run_spectrum(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                         RunManifest& manifest) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  bool all_ok = true;
  double worst_residual = 0.0;
  nlohmann::json runs = nlohmann::json::array();
  for (int d = 0; d < cfg.draws; ++d) {
    ModelParams params = cfg.model;
    if (d > 0) {  // draw 0 checks the configured parameters themselves
      params.rabi = u(rng);
      // coupling is fixed at G = 1 by the unit convention; vary Omega only
    }
    SpectrumReport rep = verify_spectrum(params, cfg.m_max);
    nlohmann::json sectors = nlohmann::json::array();
    for (const auto& s : rep.sectors) {
      nlohmann::json eigenvalues = nlohmann::json::array();
      nlohmann::json multiplicities = nlohmann::json::array();
      for (const auto& [v, mult] : s.levels) {
        eigenvalues.push_back(v);
        multiplicities.push_back(mult);
      }
      sectors.push_back({{"sector", s.sector},
                         {"eigenvalues", eigenvalues},
                         {"multiplicities", multiplicities},
                         {"residuals", {{"eigenvalue", s.max_eigen_error}, {"state", s.max_residual}}},
                         {"dark_dim", s.dark_dim},
                         {"ok", s.ok}});
      worst_residual = std::max(worst_residual, s.max_residual);
    }
    runs.push_back({{"rabi", rep.rabi}, {"eps", rep.eps}, {"sectors", sectors}, {"ok", rep.ok()}});
    all_ok = all_ok && rep.ok();
  }
  nlohmann::json report;
  report["draws"] = runs;
  report["pass"] = all_ok;
  write_file(manifest, dir, "spectrum.json", dump(report));
  manifest.status.emplace_back("spectrum", all_ok ? "pass" : "fail");
  manifest.passed = manifest.passed && all_ok;
  manifest.headline_name = "max_state_residual";
  manifest.headline = worst_residual;
}

inline void run_connection(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                           RunManifest& manifest) {
  constexpr double tol = 1e-8;
  bool ok = true;
  double worst = 0.0;
  nlohmann::json blocks = nlohmann::json::array();
  for (double theta : cfg.thetas) {
    for (int sector : cfg.sectors) {
      ConnectionMatrix fd = connection_matrix(cfg.model.coupling, theta, sector, cfg.delta);
      ConnectionMatrix half = connection_matrix(cfg.model.coupling, theta, sector, cfg.delta / 2.0);
      ConnectionMatrix an =
          connection_matrix(cfg.model.coupling, theta, sector, 0.0, ConnectionMethod::Analytic);
      const double dd = std::max(fd.max_dark_dark(), half.max_dark_dark());
      worst = std::max(worst, dd);
      ok = ok && dd < tol;
      blocks.push_back({{"theta", theta},
                        {"sector", sector},
                        {"delta", cfg.delta},
                        {"max_dark_dark", fd.max_dark_dark()},
                        {"max_dark_dark_half_delta", half.max_dark_dark()},
                        {"max_dark_dark_analytic", an.max_dark_dark()},
                        {"max_dark_bright", an.max_dark_bright()}});
    }
  }
  nlohmann::json report;
  report["connection_blocks"] = blocks;
  report["tolerance"] = tol;
  report["max_dark_dark"] = worst;
  report["pass"] = ok;
  write_file(manifest, dir, "connection.json", dump(report));
  manifest.status.emplace_back("connection", ok ? "pass" : "fail");
  manifest.passed = manifest.passed && ok;
  manifest.headline_name = "max_dark_dark";
  manifest.headline = worst;
}

inline void run_passage(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                        RunManifest& manifest) {
  const PhotonCode code = cfg.photon_code();
  PairedStateSpec paired;
  paired.m = cfg.paired_m;
  const int top = code.n_max() + 2 * paired.m;
  SectorChain chain(cfg.flavor, top + 1, cfg.model.atoms);
  ModelParams p = cfg.model;
  p.rabi = cfg.schedule.omega_high * cfg.model.coupling;
  OperatorSet ops = build_operators(cfg.flavor, p, chain);
  const PulseSchedule ramp = cfg.schedule.write_ramp(cfg.model.coupling);

  SectorFamilyState family = prepare_initial(code, paired, ops);
  const double max_eta = adiabaticity_trace(p, ramp).max_eta;

  nlohmann::json sectors = nlohmann::json::array();
  for (const auto& [m, psi] : family.parts) {
    Trajectory traj = evolve(ops, ramp, psi, cfg.integrator, cfg.decay);
    dark_population(traj, ops, ramp);
    const std::string name = "trajectory_M" + std::to_string(m) + ".csv";
    write_file(manifest, dir, name, trajectory_csv(traj));
    const double w = traj.norms.back() * traj.norms.back();
    sectors.push_back({{"sector", m},
                       {"final_norm", traj.norms.back()},
                       {"final_P_dark", w > 0.0 ? traj.p_dark.back() / w : 0.0},
                       {"trajectory", name}});
  }
  nlohmann::json report;
  report["max_eta"] = max_eta;
  report["sectors"] = sectors;
  write_file(manifest, dir, "passage.json", dump(report));
  manifest.status.emplace_back("passage", "report");
  manifest.headline_name = "max_eta";
  manifest.headline = max_eta;
}

inline void run_memory_cycle(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                             RunManifest& manifest) {
  PairedStateSpec paired;
  paired.m = cfg.paired_m;
  const MemorySchedules schedules = cfg.schedule.make(cfg.model.coupling);
  MemoryResult r = dspmem::run_memory_cycle(cfg.flavor, cfg.model, cfg.photon_code(), paired,
                                            schedules, cfg.decay, cfg.integrator);
  nlohmann::json report;
  report["f_write"] = r.f_write;
  report["f_cycle"] = r.f_cycle;
  report["f_cycle_alternating"] = r.f_cycle_alternating;
  report["overlap_alternating_after_write"] = r.overlap_alternating_after_write;
  report["overlap_plain_after_write"] = r.overlap_plain_after_write;
  report["max_eta"] = r.max_eta;
  report["peak_na_write"] = r.peak_na_write;
  report["max_dark_leak_write"] = r.max_dark_leak_write;
  report["max_dark_leak_cycle"] = r.max_dark_leak_cycle;
  report["norm_loss"] = r.norm_loss;
  report["rho_c_after_write"] = "rho_c_after_write.csv";
  report["rho_photon_final"] = "rho_photon_final.csv";
  write_file(manifest, dir, "rho_c_after_write.csv", matrix_csv(r.rho_c_after_write));
  write_file(manifest, dir, "rho_photon_final.csv", matrix_csv(r.rho_photon_final));
  write_file(manifest, dir, "memory_cycle.json", dump(report));
  manifest.status.emplace_back("memory-cycle", "report");
  manifest.headline_name = "f_cycle";
  manifest.headline = r.f_cycle;
}

inline void run_finite_n_sweep(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                               RunManifest& manifest) {
  PairedStateSpec paired;
  paired.m = cfg.paired_m;
  const PhotonCode code = cfg.photon_code();
  const MemorySchedules schedules = cfg.schedule.make(cfg.model.coupling);
  FiniteNComparison cmp =
      finite_N_comparison(code, cfg.model, cfg.atom_ladder, schedules, paired, cfg.integrator);

  // one write-stage trajectory per atom number (largest occupied sector)
  const int top = code.n_max() + 2 * paired.m;
  for (const auto& row : cmp.rows) {
    ModelParams p = cfg.model;
    p.atoms = row.atoms;
    p.rabi = cfg.schedule.omega_high * cfg.model.coupling;
    SectorChain chain(Flavor::Dicke, top + 1, p.atoms);
    OperatorSet ops = build_operators(Flavor::Dicke, p, chain);
    SectorFamilyState family = prepare_initial(code, paired, ops);
    Trajectory traj =
        evolve(ops, schedules.write, family.parts.rbegin()->second, cfg.integrator, cfg.decay);
    write_file(manifest, dir, "trajectory_N" + std::to_string(row.atoms) + ".csv",
               trajectory_csv(traj));
  }

  nlohmann::json table = nlohmann::json::array();
  for (const auto& row : cmp.rows)
    table.push_back(
        {{"atoms", row.atoms}, {"f_cycle", row.f_cycle}, {"deviation", row.deviation}});
  nlohmann::json report;
  report["f_cycle_boson"] = cmp.f_cycle_boson;
  report["rows"] = table;
  report["log_log_slope"] = cmp.rows.size() >= 2 ? cmp.log_log_slope() : 0.0;
  write_file(manifest, dir, "finite_n_summary.json", dump(report));
  manifest.status.emplace_back("finite-N-sweep", "report");
  manifest.headline_name = "log_log_slope";
  manifest.headline = report["log_log_slope"].get<double>();
}

}  // namespace detail

/// Execute one experiment, writing all outputs plus manifest.json under
/// out_dir.  Returns the manifest; manifest.passed is false iff a
/// verification-kind experiment exceeded its tolerance.
inline RunManifest run_experiment(const ExperimentConfig& cfg, const std::string& config_text,
                                  const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.config_hash = detail::fnv1a_hex(config_text);
  manifest.kind = kind_name(cfg.kind);
  try {
    switch (cfg.kind) {
      case ExperimentKind::Commutators: detail::run_commutators(cfg, out_dir, manifest); break;
      case ExperimentKind::Spectrum: detail::run_spectrum(cfg, out_dir, manifest); break;
      case ExperimentKind::Connection: detail::run_connection(cfg, out_dir, manifest); break;
      case ExperimentKind::Passage: detail::run_passage(cfg, out_dir, manifest); break;
      case ExperimentKind::MemoryCycle: detail::run_memory_cycle(cfg, out_dir, manifest); break;
      case ExperimentKind::FiniteNSweep: detail::run_finite_n_sweep(cfg, out_dir, manifest); break;
    }
  } catch (const std::exception& e) {
    throw std::runtime_error(kind_name(cfg.kind) + ": " + e.what());
  }
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail::write_file(manifest, out_dir, "manifest.json", detail::dump(manifest.to_json()));
  manifest.files.pop_back();  // the manifest does not list itself
  return manifest;
}

/// Numeric config fields a sweep may scan.
inline bool sweep_apply(ExperimentConfig& cfg, const std::string& axis, double value) {
  if (axis == "ramp_time") {
    cfg.schedule.ramp_time = value;
  } else if (axis == "hold_time") {
    cfg.schedule.hold_time = value;
  } else if (axis == "omega_high") {
    cfg.schedule.omega_high = value;
  } else if (axis == "rabi") {
    cfg.model.rabi = value;
  } else if (axis == "gamma_a") {
    cfg.decay.gamma_a = value;
  } else if (axis == "delta") {
    cfg.delta = value;
  } else if (axis == "atoms") {
    cfg.model.atoms = static_cast<int>(value);
  } else if (axis == "m_max") {
    cfg.m_max = static_cast<int>(value);
  } else if (axis == "paired_m") {
    cfg.paired_m = static_cast<int>(value);
  } else {
    return false;
  }
  return true;
}

/// One sub-run per axis value, executed by a worker pool; sub-run i writes
/// to out_dir/<axis>_<i>/.  A summary table (axis value -> headline metric)
/// is appended to the sweep manifest.
inline RunManifest sweep(const ExperimentConfig& cfg, const std::string& config_text,
                         const std::string& axis, const std::vector<double>& values,
                         const std::filesystem::path& out_dir, int threads = 1) {
  if (values.empty()) throw std::invalid_argument("sweep: empty value list");
  {
    ExperimentConfig probe = cfg;
    if (!sweep_apply(probe, axis, values.front()))
      throw std::invalid_argument("sweep: '" + axis + "' is not a numeric config field");
  }
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<RunManifest> subs(values.size());
  std::vector<std::string> failures(values.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < values.size(); i = next.fetch_add(1)) {
      ExperimentConfig sub = cfg;
      sweep_apply(sub, axis, values[i]);
      const std::filesystem::path dir = out_dir / (axis + "_" + std::to_string(i));
      try {
        subs[i] = run_experiment(sub, config_text, dir);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const int pool = std::max(1, std::min<int>(threads, static_cast<int>(values.size())));
  std::vector<std::thread> workers;
  for (int t = 0; t < pool - 1; ++t) workers.emplace_back(worker);
  worker();
  for (auto& w : workers) w.join();

  RunManifest manifest;
  manifest.config_hash = detail::fnv1a_hex(config_text);
  manifest.kind = "sweep(" + axis + "):" + kind_name(cfg.kind);
  nlohmann::json summary = nlohmann::json::array();
  for (size_t i = 0; i < values.size(); ++i) {
    const std::string name = axis + "_" + std::to_string(i);
    if (!failures[i].empty()) {
      manifest.passed = false;
      manifest.status.emplace_back(name, "error: " + failures[i]);
      summary.push_back({{axis, values[i]}, {"error", failures[i]}});
      continue;
    }
    manifest.passed = manifest.passed && subs[i].passed;
    manifest.status.emplace_back(name, subs[i].passed ? "pass" : "fail");
    for (const auto& f : subs[i].files) manifest.files.push_back(name + "/" + f);
    manifest.files.push_back(name + "/manifest.json");
    summary.push_back(
        {{axis, values[i]}, {subs[i].headline_name, subs[i].headline}, {"dir", name}});
  }
  nlohmann::json report;
  report["axis"] = axis;
  report["summary"] = summary;
  detail::write_file(manifest, out_dir, "sweep_summary.json", detail::dump(report));
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail::write_file(manifest, out_dir, "manifest.json", detail::dump(manifest.to_json()));
  manifest.files.pop_back();
  return manifest;
}

}  // namespace dspmem
