#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dspmem/protocol.hpp"

namespace dspmem {

inline constexpr const char* kVersion = "1.0.0";

enum class ExperimentKind { Commutators, Spectrum, Connection, Passage, MemoryCycle, FiniteNSweep };

inline std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Commutators: return "commutators";
    case ExperimentKind::Spectrum: return "spectrum";
    case ExperimentKind::Connection: return "connection";
    case ExperimentKind::Passage: return "passage";
    case ExperimentKind::MemoryCycle: return "memory-cycle";
    case ExperimentKind::FiniteNSweep: return "finite-N-sweep";
  }
  return "?";
}

inline std::optional<ExperimentKind> kind_from_name(const std::string& s) {
  for (ExperimentKind k :
       {ExperimentKind::Commutators, ExperimentKind::Spectrum, ExperimentKind::Connection,
        ExperimentKind::Passage, ExperimentKind::MemoryCycle, ExperimentKind::FiniteNSweep})
    if (kind_name(k) == s) return k;
  return std::nullopt;
}

/// All validation problems found in one parse, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& es) {
    std::ostringstream os;
    os << "invalid config (" << es.size() << (es.size() == 1 ? " error):" : " errors):");
    for (const auto& e : es) os << "\n  - " << e;
    return os.str();
  }
  std::vector<std::string> errors_;
};

/// Write / hold / read schedule description, stored in units of G (1/G for
/// times) after ingest rescaling.
struct ScheduleSpec {
  enum class Shape { Cosine, Linear };
  Shape shape = Shape::Cosine;
  double omega_high = 20.0;
  double omega_end = 0.0;  // write-ramp end value; nonzero is unusual but legal
  double ramp_time = 3000.0;
  double hold_time = 100.0;

  MemorySchedules make(double coupling) const {
    const double high = omega_high * coupling;
    auto ramp = [&](double from, double to) {
      return shape == Shape::Cosine ? PulseSchedule::cosine(from, to, ramp_time)
                                    : PulseSchedule::linear(from, to, ramp_time);
    };
    return {ramp(high, 0.0), PulseSchedule::hold(0.0, hold_time), ramp(0.0, high)};
  }

  /// Write ramp only, as a standalone pulse (for passage studies).
  PulseSchedule write_ramp(double coupling) const {
    const double high = omega_high * coupling;
    return shape == Shape::Cosine ? PulseSchedule::cosine(high, omega_end * coupling, ramp_time)
                                  : PulseSchedule::linear(high, omega_end * coupling, ramp_time);
  }
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Spectrum;
  Flavor flavor = Flavor::Bosonic;
  ModelParams model{1.0, 0.0, 1};  // rescaled to G = 1 on ingest
  double ingest_scale = 1.0;       // the configured G, kept for reporting
  int m_max = 6;
  std::uint64_t seed = 1;
  int draws = 20;

  // connection study
  std::vector<double> thetas{0.1, 0.5, 1.0, 1.4};
  std::vector<int> sectors{2, 4, 6};
  double delta = 1e-5;

  // protocol studies
  ScheduleSpec schedule;
  std::vector<Complex> code{1.0};
  int paired_m = 0;
  DecayConfig decay;
  IntegratorConfig integrator;
  std::vector<int> atom_ladder{4, 8, 16, 32, 64};

  std::string output;  // output directory; empty = resolved by the caller

  PhotonCode photon_code() const {
    PhotonCode c;
    c.coeff = code;
    return c;
  }
};

struct ParseResult {
  ExperimentConfig config;
  std::vector<std::string> warnings;
};

namespace detail {

/// Tracks which keys a section consumed; leftover keys are errors in strict
/// mode and warnings otherwise.
class ConfigReader {
 public:
  ConfigReader(const nlohmann::json& j, std::string section, bool strict,
               std::vector<std::string>& errors, std::vector<std::string>& warnings)
      : j_(j), section_(std::move(section)), strict_(strict), errors_(errors),
        warnings_(warnings) {
    if (!j_.is_object()) errors_.push_back(section_ + ": expected an object");
  }

  ~ConfigReader() {
    if (!j_.is_object()) return;
    for (const auto& [key, value] : j_.items())
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        if (strict_) {
          errors_.push_back(section_ + ": unknown key '" + key + "'");
        } else {
          warnings_.push_back(section_ + ": ignoring unknown key '" + key + "'");
        }
      }
  }

  bool has(const std::string& key) {
    mark(key);
    return j_.is_object() && j_.contains(key);
  }

  const nlohmann::json* get(const std::string& key) { return has(key) ? &j_.at(key) : nullptr; }

  const nlohmann::json* require(const std::string& key) {
    if (const nlohmann::json* v = get(key)) return v;
    errors_.push_back(section_ + ": missing required key '" + key + "'");
    return nullptr;
  }

  template <typename T>
  bool read(const std::string& key, T& out) {
    if (const nlohmann::json* v = get(key)) return assign(key, *v, out);
    return false;
  }

  template <typename T>
  bool assign(const std::string& key, const nlohmann::json& v, T& out) {
    try {
      out = v.get<T>();
      return true;
    } catch (const nlohmann::json::exception&) {
      errors_.push_back(section_ + ": key '" + key + "' has the wrong type");
      return false;
    }
  }

  std::vector<std::string>& errors() { return errors_; }

 private:
  void mark(const std::string& key) {
    if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) seen_.push_back(key);
  }

  const nlohmann::json& j_;
  std::string section_;
  bool strict_;
  std::vector<std::string>& errors_;
  std::vector<std::string>& warnings_;
  std::vector<std::string> seen_;
};

inline void read_code(ConfigReader& top, const nlohmann::json& v, std::vector<Complex>& out) {
  if (!v.is_array() || v.empty()) {
    top.errors().push_back("config: key 'code' must be a non-empty array");
    return;
  }
  out.clear();
  for (const auto& item : v) {
    if (item.is_number()) {
      out.emplace_back(item.get<double>(), 0.0);
    } else if (item.is_array() && item.size() == 2 && item[0].is_number() && item[1].is_number()) {
      out.emplace_back(item[0].get<double>(), item[1].get<double>());
    } else {
      top.errors().push_back("config: 'code' entries must be numbers or [re, im] pairs");
      return;
    }
  }
}

}  // namespace detail

/// Parse and fully validate a JSON experiment description.  In strict mode
/// (the default) unknown keys are errors; in lenient mode they are warnings.
/// All problems are collected and reported together.  Inputs may use any
/// coupling G; everything is rescaled to G = 1 (frequencies in units of G,
/// times in units of 1/G) on ingest.
inline ParseResult parse_config(const std::string& text, bool strict = true) {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }

  ExperimentConfig cfg;
  double scale = 1.0;  // configured G
  {
    detail::ConfigReader top(j, "config", strict, errors, warnings);

    if (const nlohmann::json* v = top.require("kind")) {
      std::string name;
      if (top.assign("kind", *v, name)) {
        if (auto k = kind_from_name(name)) {
          cfg.kind = *k;
        } else {
          errors.push_back("config: unknown experiment kind '" + name + "'");
        }
      }
    }

    if (top.has("model")) {
      detail::ConfigReader model(j.at("model"), "model", strict, errors, warnings);
      double coupling = 1.0;
      double rabi = 0.0;
      model.read("coupling", coupling);
      model.read("rabi", rabi);
      model.read("atoms", cfg.model.atoms);
      if (model.has("flavor")) {
        std::string f;
        if (model.assign("flavor", j.at("model").at("flavor"), f)) {
          if (f == "bosonic") {
            cfg.flavor = Flavor::Bosonic;
          } else if (f == "dicke") {
            cfg.flavor = Flavor::Dicke;
          } else {
            errors.push_back("model: flavor must be 'bosonic' or 'dicke'");
          }
        }
      }
      if (coupling <= 0.0) {
        errors.push_back("model: coupling must be positive");
      } else {
        scale = coupling;
      }
      if (rabi < 0.0) errors.push_back("model: rabi must be non-negative");
      cfg.model.rabi = rabi / scale;
      if (cfg.model.atoms < 1) errors.push_back("model: atoms must be >= 1");
    }
    cfg.ingest_scale = scale;

    top.read("m_max", cfg.m_max);
    if (cfg.m_max < 0 || cfg.m_max > 64) errors.push_back("config: m_max must be in [0, 64]");
    top.read("seed", cfg.seed);
    top.read("draws", cfg.draws);
    if (cfg.draws < 1) errors.push_back("config: draws must be >= 1");
    top.read("thetas", cfg.thetas);
    for (double t : cfg.thetas)
      if (t <= 0.0 || t >= M_PI / 2.0)
        errors.push_back("config: thetas must lie strictly inside (0, pi/2)");
    top.read("sectors", cfg.sectors);
    for (int s : cfg.sectors)
      if (s < 0) errors.push_back("config: sectors must be >= 0");
    top.read("delta", cfg.delta);
    top.read("paired_m", cfg.paired_m);
    if (cfg.paired_m < 0) errors.push_back("config: paired_m must be >= 0");
    top.read("atom_ladder", cfg.atom_ladder);
    for (int n : cfg.atom_ladder)
      if (n < 1) errors.push_back("config: atom_ladder entries must be >= 1");
    top.read("output", cfg.output);

    if (top.has("schedule")) {
      detail::ConfigReader sched(j.at("schedule"), "schedule", strict, errors, warnings);
      if (sched.has("shape")) {
        std::string s;
        if (sched.assign("shape", j.at("schedule").at("shape"), s)) {
          if (s == "cosine") {
            cfg.schedule.shape = ScheduleSpec::Shape::Cosine;
          } else if (s == "linear") {
            cfg.schedule.shape = ScheduleSpec::Shape::Linear;
          } else {
            errors.push_back("schedule: shape must be 'cosine' or 'linear'");
          }
        }
      }
      double omega_high = 20.0 * scale;  // default photon-type endpoint
      double omega_end = 0.0;
      double ramp_time = 3000.0 / scale;
      double hold_time = 100.0 / scale;
      sched.read("omega_high", omega_high);
      sched.read("omega_end", omega_end);
      sched.read("ramp_time", ramp_time);
      sched.read("hold_time", hold_time);
      cfg.schedule.omega_high = omega_high / scale;
      cfg.schedule.omega_end = omega_end / scale;
      cfg.schedule.ramp_time = ramp_time * scale;
      cfg.schedule.hold_time = hold_time * scale;
      if (cfg.schedule.ramp_time <= 0.0) errors.push_back("schedule: ramp_time must be positive");
      if (cfg.schedule.hold_time <= 0.0) errors.push_back("schedule: hold_time must be positive");
      if (omega_high < 0.0 || omega_end < 0.0)
        errors.push_back("schedule: Omega values must be >= 0");
      if (omega_end > omega_high)
        warnings.push_back(
            "schedule: write ramp ends above its start (legal but unusual); proceeding");
    }

    if (top.has("decay")) {
      detail::ConfigReader decay(j.at("decay"), "decay", strict, errors, warnings);
      double gamma = 0.0;
      decay.read("gamma_a", gamma);
      if (gamma < 0.0) errors.push_back("decay: decay rate must be non-negative");
      cfg.decay.gamma_a = gamma / scale;
    }

    if (top.has("integrator")) {
      detail::ConfigReader integ(j.at("integrator"), "integrator", strict, errors, warnings);
      integ.read("dt", cfg.integrator.dt);
      integ.read("snapshots", cfg.integrator.snapshots);
      if (cfg.integrator.dt < 0.0) errors.push_back("integrator: dt must be >= 0 (0 = auto)");
      if (cfg.integrator.dt > 0.0) cfg.integrator.dt *= scale;
      if (cfg.integrator.snapshots < 1) errors.push_back("integrator: snapshots must be >= 1");
    }

    if (top.has("code")) detail::read_code(top, j.at("code"), cfg.code);
    {
      double s = 0.0;
      for (const Complex& c : cfg.code) s += std::norm(c);
      if (std::abs(s - 1.0) > 1e-12) errors.push_back("config: code must be normalized");
    }

    if (cfg.flavor == Flavor::Dicke &&
        (cfg.kind == ExperimentKind::Connection || cfg.kind == ExperimentKind::Passage))
      errors.push_back("config: " + kind_name(cfg.kind) +
                       " requires the bosonic flavor (dark projectors are bosonic-only)");
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return {std::move(cfg), std::move(warnings)};
}

}  // namespace dspmem
