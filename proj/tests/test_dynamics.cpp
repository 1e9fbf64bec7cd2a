#include "doctest.h"
#include "dspmem/dynamics.hpp"

using namespace dspmem;

namespace {

struct Fixture {
  ModelParams params;
  SectorChain chain;
  OperatorSet ops;

  Fixture(double coupling, double rabi, int m_max)
      : params{coupling, rabi, 1},
        chain(Flavor::Bosonic, m_max),
        ops(build_operators(Flavor::Bosonic, params, chain)) {}
};

}  // namespace

TEST_CASE("schedule shapes and derivatives") {
  PulseSchedule lin = PulseSchedule::linear(2.0, 0.0, 4.0);
  CHECK(lin.value(1.0) == doctest::Approx(1.5));
  CHECK(lin.derivative(3.0) == doctest::Approx(-0.5));

  PulseSchedule cos = PulseSchedule::cosine(2.0, 0.0, 4.0);
  CHECK(cos.value(0.0) == doctest::Approx(2.0));
  CHECK(cos.value(4.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(cos.value(2.0) == doctest::Approx(1.0));
  CHECK(cos.derivative(0.0) == doctest::Approx(0.0));  // endpoint derivative vanishes
  CHECK(cos.derivative(4.0) == doctest::Approx(0.0).epsilon(1e-14));

  PulseSchedule pw = PulseSchedule::samples({0.0, 1.0, 3.0}, {0.0, 2.0, 2.0});
  CHECK(pw.value(0.5) == doctest::Approx(1.0));
  CHECK(pw.derivative(0.5) == doctest::Approx(2.0));
  CHECK(pw.derivative(2.0) == doctest::Approx(0.0));

  PulseSchedule comp = PulseSchedule::composite({lin, PulseSchedule::hold(0.0, 2.0)});
  CHECK(comp.duration() == doctest::Approx(6.0));
  CHECK(comp.value(5.0) == doctest::Approx(0.0));
  CHECK(comp.max_value() == doctest::Approx(2.0));

  CHECK_THROWS_AS(PulseSchedule::linear(-1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PulseSchedule::composite({lin, PulseSchedule::hold(1.0, 2.0)}),
                  std::invalid_argument);  // discontinuous joint
}

TEST_CASE("stationary dressed state acquires only a phase on Hold") {
  Fixture f(1.0, 1.2, 4);
  PolaritonOps pol = polariton_ops(PolaritonAngle::from_params(1.0, 1.2), f.ops);
  const DressedLabel label{1, 0, 1};  // eigenvalue +eps in sector 2
  StateVector psi0 = dressed_state(label, pol, f.chain);
  const double duration = 7.0;
  Trajectory traj = evolve(f.ops, PulseSchedule::hold(1.2, duration), psi0);
  const Complex overlap = inner(psi0, traj.final_state());
  CHECK(std::abs(std::abs(overlap) - 1.0) < 1e-8);
  const double eps = std::hypot(1.0, 1.2);
  const Complex expected = std::exp(Complex(0.0, -eps * duration));
  CHECK(std::abs(overlap - expected) < 1e-6);
}

TEST_CASE("norm, energy and excitation are conserved on Hold") {
  Fixture f(1.3, 0.7, 4);
  auto s3 = f.chain.at(3);
  Eigen::VectorXcd v = Eigen::VectorXcd::Random(s3->dim());
  StateVector psi0 = StateVector(s3, v).normalized();
  PulseSchedule hold = PulseSchedule::hold(0.7, 11.0);
  Trajectory traj = evolve(f.ops, hold, psi0);
  const SparseOperator h = build_hamiltonian(f.ops).block(3);
  const double e0 = std::real(inner(psi0, h.apply(psi0)));
  // tolerances sit well above the accumulated RK4 truncation drift (~1e-7)
  for (size_t i = 0; i < traj.states.size(); ++i) {
    CHECK(std::abs(traj.norms[i] - 1.0) < 1e-6);
    const double e = std::real(inner(traj.states[i], h.apply(traj.states[i])));
    CHECK(std::abs(e - e0) < 1e-6 * std::hypot(1.3, 0.7));
    CHECK(std::abs(traj.pop_ph[i] + traj.pop_a[i] + traj.pop_c[i] - 3.0) < 1e-6);
  }
}

TEST_CASE("integrator is fourth order") {
  Fixture f(1.0, 2.0, 3);
  auto s2 = f.chain.at(2);
  StateVector psi0 = StateVector::basis_vector(s2, {2, 0, 0});
  // smooth schedule so the step-halving ratio is not polluted by kinks
  PulseSchedule ramp = PulseSchedule::cosine(2.0, 0.5, 8.0);
  auto run = [&](double dt) {
    IntegratorConfig c;
    c.dt = dt;
    c.snapshots = 1;
    return evolve(f.ops, ramp, psi0, c).final_state();
  };
  const double dt = 1.0 / (25.0 * std::hypot(1.0, 2.0));
  const Eigen::VectorXcd ref = run(dt / 8.0).amps();
  const double e1 = (run(dt).amps() - ref).norm();
  const double e2 = (run(dt / 2.0).amps() - ref).norm();
  const double ratio = e1 / e2;
  CHECK(ratio > 8.0);
  CHECK(ratio < 32.0);
}

TEST_CASE("dt guard rejects coarse steps") {
  Fixture f(1.0, 0.0, 2);
  StateVector psi0 = StateVector::basis_vector(f.chain.at(1), {1, 0, 0});
  IntegratorConfig c;
  c.dt = 1.0;
  CHECK_THROWS_AS(evolve(f.ops, PulseSchedule::hold(0.0, 5.0), psi0, c), std::invalid_argument);
}

TEST_CASE("decay damps the norm monotonically; gamma=0 is unitary") {
  Fixture f(1.0, 0.5, 3);
  StateVector psi0 = StateVector::basis_vector(f.chain.at(2), {0, 2, 0});
  DecayConfig decay;
  decay.gamma_a = 0.2;
  Trajectory damped = evolve(f.ops, PulseSchedule::hold(0.5, 10.0), psi0, {}, decay);
  for (size_t i = 1; i < damped.norms.size(); ++i) CHECK(damped.norms[i] <= damped.norms[i - 1] + 1e-12);
  CHECK(damped.final_norm() < 0.9);
  Trajectory unitary = evolve(f.ops, PulseSchedule::hold(0.5, 10.0), psi0);
  CHECK(std::abs(unitary.final_norm() - 1.0) < 1e-8);
  DecayConfig bad;
  bad.gamma_a = -1.0;
  CHECK_THROWS_AS(evolve(f.ops, PulseSchedule::hold(0.5, 1.0), psi0, {}, bad),
                  std::invalid_argument);
}

TEST_CASE("adiabaticity trace: closed forms") {
  ModelParams params{1.0, 0.0, 1};
  AdiabaticityTrace hold = adiabaticity_trace(params, PulseSchedule::hold(3.0, 5.0));
  CHECK(hold.max_eta == 0.0);

  // linear ramp Omega: G -> 0 over T peaks at the Omega=0 end with 1/(G T)
  const double duration = 50.0;
  AdiabaticityTrace lin =
      adiabaticity_trace(params, PulseSchedule::linear(1.0, 0.0, duration), 2048);
  CHECK(lin.max_eta == doctest::Approx(1.0 / duration).epsilon(1e-6));
  CHECK(lin.eta.back() == doctest::Approx(1.0 / duration).epsilon(1e-9));

  AdiabaticityTrace cos =
      adiabaticity_trace(params, PulseSchedule::cosine(5.0, 0.0, duration), 2048);
  CHECK(cos.eta.front() == 0.0);
  CHECK(cos.eta.back() == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(cos.max_eta > 0.0);
}

TEST_CASE("slow ramp keeps the state in the dark space") {
  Fixture f(1.0, 10.0, 2);
  PolaritonOps pol = polariton_ops(PolaritonAngle::from_params(1.0, 10.0), f.ops);
  StateVector psi0 = dressed_state({0, 0, 1}, pol, f.chain);
  PulseSchedule ramp = PulseSchedule::cosine(10.0, 0.0, 2000.0);
  ModelParams p = f.params;
  p.rabi = 10.0;
  CHECK(adiabaticity_trace(p, ramp).max_eta <= 0.01);
  Trajectory traj = evolve(f.ops, ramp, psi0);
  dark_population(traj, f.ops, ramp);
  for (double pd : traj.p_dark) CHECK(pd >= 0.99);
  // final state is -|1>_C up to global phase
  StateVector target = StateVector::basis_vector(f.chain.at(1), {0, 0, 1});
  CHECK(std::abs(inner(target, traj.final_state())) >= 0.999);
}

TEST_CASE("fast ramp leaks population out of the dark space") {
  Fixture f(1.0, 10.0, 2);
  PolaritonOps pol = polariton_ops(PolaritonAngle::from_params(1.0, 10.0), f.ops);
  StateVector psi0 = dressed_state({0, 0, 1}, pol, f.chain);
  PulseSchedule ramp = PulseSchedule::cosine(10.0, 0.0, 2.0);
  Trajectory traj = evolve(f.ops, ramp, psi0);
  dark_population(traj, f.ops, ramp);
  CHECK(traj.p_dark.back() < 0.99);
}

TEST_CASE("bright state has zero dark population; quench freezes it") {
  Fixture f(1.0, 1.0, 2);
  PolaritonOps pol = polariton_ops(PolaritonAngle::from_params(1.0, 1.0), f.ops);
  StateVector bright = dressed_state({1, 0, 0}, pol, f.chain);
  PulseSchedule quench = PulseSchedule::hold(1.0, 8.0);
  Trajectory traj = evolve(f.ops, quench, bright);
  dark_population(traj, f.ops, quench);
  for (double pd : traj.p_dark) CHECK(pd < 1e-10);  // P commutes with the static H
}

TEST_CASE("diabatic loss shrinks monotonically as the ramp slows (16x range)") {
  Fixture f(1.0, 10.0, 2);
  PolaritonOps pol = polariton_ops(PolaritonAngle::from_params(1.0, 10.0), f.ops);
  StateVector psi0 = dressed_state({0, 0, 1}, pol, f.chain);
  double prev_loss = 2.0;
  for (double duration : {50.0, 100.0, 200.0, 400.0, 800.0}) {
    PulseSchedule ramp = PulseSchedule::cosine(10.0, 0.0, duration);
    Trajectory traj = evolve(f.ops, ramp, psi0);
    dark_population(traj, f.ops, ramp);
    const double loss = 1.0 - traj.p_dark.back();
    CHECK(loss < prev_loss);
    prev_loss = loss;
  }
}
