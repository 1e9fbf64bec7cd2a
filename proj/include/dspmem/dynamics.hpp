#pragma once

#include "dspmem/operators.hpp"
#include "dspmem/schedule.hpp"
#include "dspmem/spectrum.hpp"

namespace dspmem {

/// Phenomenological excited-mode damping: a non-Hermitian
/// -i (gamma_a / 2) * (A-mode occupation) term, no quantum jumps.
struct DecayConfig {
  double gamma_a = 0.0;

  void validate() const {
    if (gamma_a < 0.0) throw std::invalid_argument("DecayConfig: decay rate must be non-negative");
  }
};

struct IntegratorConfig {
  double dt = 0.0;      // 0 = auto: 1 / (50 * eps_max)
  int snapshots = 200;  // target number of recorded snapshots
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  std::vector<double> norms;
  std::vector<double> pop_ph, pop_a, pop_c;  // <n_ph>, <n_A>, <n_C> per snapshot
  std::vector<double> p_dark;                // filled by dark_population

  double final_norm() const { return norms.back(); }
  const StateVector& final_state() const { return states.back(); }
};

namespace detail {

inline double expectation(const SparseOperator& op, const StateVector& psi) {
  return std::real(inner(psi, op.apply(psi)));
}

}  // namespace detail

/// Fixed-step 4th-order Runge-Kutta integration of i dpsi/dt = H(t) psi
/// with H(t) = G (a A^dag + h.c.) + Omega(t) (T+ + h.c.) and optional
/// non-Hermitian decay.  The Hamiltonian is sampled at the substage times.
/// Requires ops.chain.m_max() >= sector + 1 so the excitation-conserving
/// composites exist on the sector.
inline Trajectory evolve(const OperatorSet& ops, const PulseSchedule& schedule,
                         const StateVector& psi0, const IntegratorConfig& config = {},
                         const DecayConfig& decay = {}) {
  decay.validate();
  const int sector = psi0.sector()->excitation();
  const double coupling = ops.params.coupling;
  const double eps_max = std::hypot(coupling, schedule.max_value());
  double dt = config.dt > 0.0 ? config.dt : 1.0 / (50.0 * eps_max);
  if (dt > 1.0 / (20.0 * eps_max))
    throw std::invalid_argument("evolve: dt too large for the fastest dressed oscillation");

  const SparseOperator hc = coupling_term(ops).block(sector);
  const SparseOperator hd = drive_term(ops).block(sector);
  const SparseOperator& na = ops.num_a.block(sector);
  const bool decaying = decay.gamma_a > 0.0;

  const double total = schedule.duration();
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(total / dt)));
  dt = total / static_cast<double>(steps);
  const long stride = std::max<long>(1, steps / std::max(1, config.snapshots));

  Eigen::VectorXcd y = psi0.amps();
  Eigen::VectorXcd k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
  const Complex mi(0.0, -1.0);

  auto rhs = [&](double t, const Eigen::VectorXcd& x, Eigen::VectorXcd& out) {
    out.setZero();
    hc.apply_add(mi * coupling, x, out);
    hd.apply_add(mi * schedule.value(t), x, out);
    if (decaying) na.apply_add(Complex(-0.5 * decay.gamma_a, 0.0), x, out);
  };

  Trajectory traj;
  auto record = [&](double t) {
    StateVector snap(psi0.sector(), y);
    traj.times.push_back(t);
    traj.norms.push_back(snap.norm());
    traj.pop_ph.push_back(detail::expectation(ops.num_ph.block(sector), snap));
    traj.pop_a.push_back(detail::expectation(na, snap));
    traj.pop_c.push_back(detail::expectation(ops.num_c.block(sector), snap));
    traj.states.push_back(std::move(snap));
    if (!std::isfinite(traj.norms.back()))
      throw std::runtime_error("evolve: divergence (non-finite norm) at t=" + std::to_string(t));
  };

  record(0.0);
  for (long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    rhs(t, y, k1);
    tmp = y + (0.5 * dt) * k1;
    rhs(t + 0.5 * dt, tmp, k2);
    tmp = y + (0.5 * dt) * k2;
    rhs(t + 0.5 * dt, tmp, k3);
    tmp = y + dt * k3;
    rhs(t + dt, tmp, k4);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((i + 1) % stride == 0 || i + 1 == steps) record(static_cast<double>(i + 1) * dt);
  }
  return traj;
}

inline Trajectory evolve(Flavor flavor, const ModelParams& params, const PulseSchedule& schedule,
                         const StateVector& psi0, const IntegratorConfig& config = {},
                         const DecayConfig& decay = {}) {
  SectorChain chain(flavor, psi0.sector()->excitation() + 1, params.atoms);
  return evolve(build_operators(flavor, params, chain), schedule, psi0, config, decay);
}

/// Dimensionless slowness measure eta(t) = G |dOmega/dt| / eps(t)^3 along a
/// schedule, with the instantaneous mixing angle and dressed gap.
struct AdiabaticityTrace {
  std::vector<double> times, eta, theta, eps;
  double max_eta = 0.0;
};

inline AdiabaticityTrace adiabaticity_trace(const ModelParams& params,
                                            const PulseSchedule& schedule, int grid_points = 512) {
  if (grid_points < 2) throw std::invalid_argument("adiabaticity_trace: need >= 2 grid points");
  AdiabaticityTrace trace;
  for (int i = 0; i < grid_points; ++i) {
    const double t = schedule.duration() * i / (grid_points - 1);
    const PolaritonAngle a = PolaritonAngle::from_params(params.coupling, schedule.value(t));
    const double eta = params.coupling * std::abs(schedule.derivative(t)) / std::pow(a.eps, 3);
    trace.times.push_back(t);
    trace.eta.push_back(eta);
    trace.theta.push_back(a.theta);
    trace.eps.push_back(a.eps);
    trace.max_eta = std::max(trace.max_eta, eta);
  }
  return trace;
}

/// P_dark(t) = || P(theta(t)) psi(t) ||^2 along a recorded trajectory.
/// Bosonic flavor only; fills traj.p_dark and returns a copy.
inline std::vector<double> dark_population(Trajectory& traj, const OperatorSet& ops,
                                           const PulseSchedule& schedule) {
  if (ops.flavor != Flavor::Bosonic)
    throw std::invalid_argument("dark_population: bosonic flavor only");
  const int sector = traj.states.front().sector()->excitation();
  traj.p_dark.clear();
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const PolaritonAngle a =
        PolaritonAngle::from_params(ops.params.coupling, schedule.value(traj.times[i]));
    const SparseOperator p = dark_projector(a, ops, ops.chain, sector);
    const double w = p.apply(traj.states[i]).norm();
    traj.p_dark.push_back(w * w);
  }
  return traj.p_dark;
}

}  // namespace dspmem
