#pragma once

#include <map>

#include "dspmem/dynamics.hpp"

namespace dspmem {

/// Photon-number superposition Sum_n c_n |n> recorded into the memory.
struct PhotonCode {
  std::vector<Complex> coeff;  // index = photon number

  static PhotonCode fock(int n) {
    PhotonCode c;
    c.coeff.assign(static_cast<size_t>(n) + 1, 0.0);
    c.coeff.back() = 1.0;
    return c;
  }

  int n_max() const { return static_cast<int>(coeff.size()) - 1; }

  void validate() const {
    if (coeff.empty()) throw std::invalid_argument("PhotonCode: empty");
    double s = 0.0;
    for (const Complex& c : coeff) s += std::norm(c);
    if (std::abs(s - 1.0) > 1e-12)
      throw std::invalid_argument("PhotonCode: coefficients must be normalized");
  }
};

/// Exciton pairing order of the generalized protocol; m = 0 is the plain
/// dark-state memory.  The partner mode of the pairing (A^dag^2 - P^dag^2)
/// is C before the write and the photon mode after it.
struct PairedStateSpec {
  enum class Partner { Photon, ExcitonC };
  int m = 0;
  Partner partner = Partner::ExcitonC;

  void validate() const {
    if (m < 0) throw std::invalid_argument("PairedStateSpec: m must be >= 0");
  }
};

struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Amplitudes distributed over excitation sectors; different photon numbers
/// of one code live in different sectors.  Relative inter-sector phases are
/// physical and tracked exactly.
struct SectorFamilyState {
  std::map<int, StateVector> parts;  // key: sector excitation number

  double squared_norm() const {
    double s = 0.0;
    for (const auto& [m, psi] : parts) s += psi.norm() * psi.norm();
    return s;
  }

  Complex overlap(const SectorFamilyState& o) const {
    Complex z = 0.0;
    for (const auto& [m, psi] : parts) {
      auto it = o.parts.find(m);
      if (it != o.parts.end()) z += inner(it->second, psi);
    }
    return z;
  }
};

/// Paired exciton state (A^dag^2 - P^dag^2)^m / (2^m m!) |0>, combined with
/// photon component |n>; lives in sector 2m + n.
inline StateVector paired_photon_component(const OperatorSet& ops, int pairing, int n_photon,
                                           PairedStateSpec::Partner partner) {
  const OperatorFamily& p_raise =
      partner == PairedStateSpec::Partner::ExcitonC ? ops.exc_c_raise : ops.ph_raise;
  StateVector psi = StateVector::basis_vector(ops.chain.at(0), {0, 0, 0});
  for (int i = 0; i < n_photon; ++i) psi = ops.ph_raise.apply(psi);
  psi *= std::exp(-0.5 * detail::ln_factorial(n_photon));
  for (int i = 0; i < pairing; ++i) {
    StateVector up = ops.exc_a_raise.apply(ops.exc_a_raise.apply(psi));
    up -= p_raise.apply(p_raise.apply(psi));
    psi = std::move(up);
  }
  psi *= std::exp(-pairing * std::log(2.0) - detail::ln_factorial(pairing));
  return psi;
}

/// Initial state of the memory cycle: Sum_n c_n |A,C,m> (x) |n>_photon.
inline SectorFamilyState prepare_initial(const PhotonCode& code, const PairedStateSpec& paired,
                                         const OperatorSet& ops) {
  code.validate();
  paired.validate();
  const int top = code.n_max() + 2 * paired.m;
  if (top + 1 > ops.chain.m_max())
    throw std::length_error("prepare_initial: sector budget exceeded (need chain to M=" +
                            std::to_string(top + 1) + ")");
  SectorFamilyState family;
  for (int n = 0; n <= code.n_max(); ++n) {
    if (code.coeff[static_cast<size_t>(n)] == Complex(0.0)) continue;
    StateVector psi = paired_photon_component(ops, paired.m, n, PairedStateSpec::Partner::ExcitonC);
    psi *= code.coeff[static_cast<size_t>(n)];
    family.parts.emplace(2 * paired.m + n, std::move(psi));
  }
  return family;
}

/// Partial trace of a sector family onto one mode's occupation basis.
/// Hermitian and PSD; trace equals the surviving probability.
enum class TraceMode { Photon, ExcitonA, ExcitonC };

inline Eigen::MatrixXcd reduced_density_matrix(const SectorFamilyState& family, TraceMode mode) {
  auto pick = [mode](const BasisState& s) {
    switch (mode) {
      case TraceMode::Photon: return s.n_ph;
      case TraceMode::ExcitonA: return s.n_a;
      default: return s.n_c;
    }
  };
  auto rest = [mode](const BasisState& s) -> std::pair<int, int> {
    switch (mode) {
      case TraceMode::Photon: return {s.n_a, s.n_c};
      case TraceMode::ExcitonA: return {s.n_ph, s.n_c};
      default: return {s.n_ph, s.n_a};
    }
  };

  int dim = 1;
  std::map<std::pair<int, int>, std::map<int, Complex>> groups;
  for (const auto& [m, psi] : family.parts) {
    const SectorBasis& basis = *psi.sector();
    for (int i = 0; i < basis.dim(); ++i) {
      const Complex a = psi[i];
      if (a == Complex(0.0)) continue;
      const BasisState& s = basis.state(i);
      groups[rest(s)][pick(s)] += a;
      dim = std::max(dim, pick(s) + 1);
    }
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [other, amps] : groups)
    for (const auto& [n, an] : amps)
      for (const auto& [np, anp] : amps) rho(n, np) += an * std::conj(anp);
  return rho;
}

/// Write / hold / read stages.  The write ramp must start at
/// Omega >= 20 G (the photon-type endpoint) and end at Omega = 0; the read
/// ramp reverses it; the hold runs at Omega = 0.
struct MemorySchedules {
  PulseSchedule write, hold, read;

  void validate(double coupling) const {
    const double high = 20.0 * coupling;
    if (write.value(0.0) < high - 1e-9 || write.value(write.duration()) > 1e-9)
      throw ProtocolError("memory cycle: write ramp must take Omega from >= 20 G down to 0");
    if (read.value(0.0) > 1e-9 || read.value(read.duration()) < high - 1e-9)
      throw ProtocolError("memory cycle: read ramp must take Omega from 0 up to >= 20 G");
    if (hold.max_value() > 1e-9)
      throw ProtocolError("memory cycle: hold stage must run at Omega = 0");
  }
};

inline MemorySchedules cosine_memory_schedules(double coupling, double ramp_time,
                                               double hold_time, double omega_high_factor = 20.0) {
  const double high = omega_high_factor * coupling;
  return {PulseSchedule::cosine(high, 0.0, ramp_time), PulseSchedule::hold(0.0, hold_time),
          PulseSchedule::cosine(0.0, high, ramp_time)};
}

/// Everything measured in one memory cycle.
struct MemoryResult {
  double f_write = 0.0;      // vs the exactly transported dark image (sign convention included)
  double f_cycle = 0.0;      // photon-mode fidelity vs the original code after the full cycle
  double f_cycle_alternating = 0.0;  // same with (-1)^n applied to the code
  double overlap_alternating_after_write = 0.0;  // C-mode overlap with Sum c_n (-1)^n |n>
  double overlap_plain_after_write = 0.0;        // C-mode overlap with Sum c_n |n>
  double max_eta = 0.0;
  double peak_na_write = 0.0;  // largest <n_A> during the write
  double max_dark_leak_write = 0.0;  // max over t of 1 - P_dark(t) during the write (unit-norm scaled)
  double max_dark_leak_cycle = 0.0;  // same, maximized over all three stages
  double norm_loss = 0.0;      // 1 - surviving probability (0 when unitary)
  Eigen::MatrixXcd rho_c_after_write;
  Eigen::MatrixXcd rho_photon_final;
};

namespace detail {

inline SectorFamilyState evolve_family(const OperatorSet& ops, const PulseSchedule& schedule,
                                       const SectorFamilyState& family,
                                       const IntegratorConfig& config, const DecayConfig& decay,
                                       double* peak_na = nullptr, double* max_dark_leak = nullptr) {
  SectorFamilyState out;
  for (const auto& [m, psi] : family.parts) {
    Trajectory traj = evolve(ops, schedule, psi, config, decay);
    if (peak_na)
      for (size_t i = 0; i < traj.pop_a.size(); ++i)
        *peak_na = std::max(*peak_na, traj.pop_a[i]);
    if (max_dark_leak && ops.flavor == Flavor::Bosonic) {
      dark_population(traj, ops, schedule);
      for (size_t i = 0; i < traj.p_dark.size(); ++i) {
        const double w = traj.norms[i] * traj.norms[i];
        if (w > 0.0) *max_dark_leak = std::max(*max_dark_leak, 1.0 - traj.p_dark[i] / w);
      }
    }
    out.parts.emplace(m, traj.final_state());
  }
  return out;
}

/// Image of the family's dark-space component transported to the target
/// angle (coefficients frozen, per the vanishing dark-dark connection and
/// the zero eigenvalue), normalized.
inline SectorFamilyState transported_dark_image(const SectorFamilyState& family,
                                                const OperatorSet& ops,
                                                const PolaritonAngle& from,
                                                const PolaritonAngle& to) {
  PolaritonOps pol_from = polariton_ops(from, ops);
  PolaritonOps pol_to = polariton_ops(to, ops);
  SectorFamilyState target;
  double sq = 0.0;
  for (const auto& [m, psi] : family.parts) {
    StateVector img(ops.chain.at(m));
    for (const auto& l : dark_labels(m)) {
      const Complex a = inner(dressed_state(l, pol_from, ops.chain), psi);
      StateVector d = dressed_state(l, pol_to, ops.chain);
      d *= a;
      img += d;
    }
    sq += img.norm() * img.norm();
    target.parts.emplace(m, std::move(img));
  }
  const double n = std::sqrt(sq);
  for (auto& [m, psi] : target.parts) psi *= Complex(1.0 / n);
  return target;
}

inline double code_overlap(const Eigen::MatrixXcd& rho, const PhotonCode& code, bool alternating) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(rho.rows());
  for (int n = 0; n <= code.n_max() && n < rho.rows(); ++n)
    v[n] = code.coeff[static_cast<size_t>(n)] * (alternating && (n % 2) ? -1.0 : 1.0);
  return std::real(v.dot(rho * v));
}

}  // namespace detail

/// Full write - hold - read memory cycle with diagnostics.
inline MemoryResult run_memory_cycle(Flavor flavor, const ModelParams& params,
                                     const PhotonCode& code, const PairedStateSpec& paired,
                                     const MemorySchedules& schedules,
                                     const DecayConfig& decay = {},
                                     const IntegratorConfig& config = {}) {
  code.validate();
  paired.validate();
  schedules.validate(params.coupling);
  const int top = code.n_max() + 2 * paired.m;
  SectorChain chain(flavor, top + 1, params.atoms);
  ModelParams p = params;
  p.rabi = schedules.write.value(0.0);
  OperatorSet ops = build_operators(flavor, p, chain);

  MemoryResult result;
  {
    AdiabaticityTrace wtrace = adiabaticity_trace(p, schedules.write);
    AdiabaticityTrace rtrace = adiabaticity_trace(p, schedules.read);
    result.max_eta = std::max(wtrace.max_eta, rtrace.max_eta);
  }

  SectorFamilyState psi0 = prepare_initial(code, paired, ops);
  SectorFamilyState after_write = detail::evolve_family(ops, schedules.write, psi0, config, decay,
                                                        &result.peak_na_write,
                                                        &result.max_dark_leak_write);

  if (flavor == Flavor::Bosonic) {
    const PolaritonAngle start = PolaritonAngle::from_params(p.coupling, schedules.write.value(0.0));
    const PolaritonAngle end = PolaritonAngle::from_theta(M_PI / 2.0, p.coupling);
    SectorFamilyState target = detail::transported_dark_image(psi0, ops, start, end);
    result.f_write = std::norm(target.overlap(after_write));
  }
  result.rho_c_after_write = reduced_density_matrix(after_write, TraceMode::ExcitonC);
  result.overlap_alternating_after_write = detail::code_overlap(result.rho_c_after_write, code, true);
  result.overlap_plain_after_write = detail::code_overlap(result.rho_c_after_write, code, false);

  result.max_dark_leak_cycle = result.max_dark_leak_write;
  SectorFamilyState after_hold = detail::evolve_family(ops, schedules.hold, after_write, config,
                                                       decay, nullptr, &result.max_dark_leak_cycle);
  SectorFamilyState final_state = detail::evolve_family(ops, schedules.read, after_hold, config,
                                                        decay, nullptr, &result.max_dark_leak_cycle);

  result.norm_loss = 1.0 - final_state.squared_norm();
  result.rho_photon_final = reduced_density_matrix(final_state, TraceMode::Photon);
  result.f_cycle = detail::code_overlap(result.rho_photon_final, code, false);
  result.f_cycle_alternating = detail::code_overlap(result.rho_photon_final, code, true);
  return result;
}

/// F_cycle at fixed coupling for a ladder of atom numbers, against the
/// bosonic (infinite-N) limit.
struct FiniteNComparison {
  struct Row {
    int atoms;
    double f_cycle;
    double deviation;  // |F(N) - F(boson)|
  };
  double f_cycle_boson = 0.0;
  std::vector<Row> rows;

  /// Least-squares slope of log(deviation) vs log(N).
  double log_log_slope() const {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rows.size());
    for (const auto& r : rows) {
      const double x = std::log(double(r.atoms)), y = std::log(r.deviation);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
};

inline FiniteNComparison finite_N_comparison(const PhotonCode& code, const ModelParams& params,
                                             const std::vector<int>& atom_ladder,
                                             const MemorySchedules& schedules,
                                             const PairedStateSpec& paired = {},
                                             const IntegratorConfig& config = {}) {
  FiniteNComparison out;
  out.f_cycle_boson =
      run_memory_cycle(Flavor::Bosonic, params, code, paired, schedules, {}, config).f_cycle;
  for (int n : atom_ladder) {
    ModelParams p = params;
    p.atoms = n;
    const double f =
        run_memory_cycle(Flavor::Dicke, p, code, paired, schedules, {}, config).f_cycle;
    out.rows.push_back({n, f, std::abs(f - out.f_cycle_boson)});
  }
  return out;
}

}  // namespace dspmem
