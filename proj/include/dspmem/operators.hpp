#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "dspmem/sparse.hpp"

namespace dspmem {

/// Model parameters in simulation units (frequencies in units of the
/// collective coupling G = g*sqrt(N), times in 1/G).
struct ModelParams {
  double coupling = 1.0;   // G = g*sqrt(N)
  double rabi = 0.0;       // classical Rabi frequency Omega
  int atoms = 1;           // N, Dicke flavor only

  void validate(Flavor flavor) const {
    if (!(coupling > 0.0)) throw std::invalid_argument("ModelParams: coupling G must be > 0");
    if (rabi < 0.0) throw std::invalid_argument("ModelParams: Rabi frequency must be >= 0");
    if (flavor == Flavor::Dicke && atoms < 1)
      throw std::invalid_argument("ModelParams: atom count must be >= 1");
  }
};

/// Mixing angle tan(theta) = G / Omega and the dressed gap
/// eps = sqrt(G^2 + Omega^2).  theta = pi/2 at Omega = 0.
struct PolaritonAngle {
  double theta = 0.0;
  double sin_t = 0.0;
  double cos_t = 1.0;
  double eps = 1.0;

  static PolaritonAngle from_params(double coupling, double rabi) {
    PolaritonAngle a;
    a.eps = std::hypot(coupling, rabi);
    a.theta = std::atan2(coupling, rabi);
    a.sin_t = coupling / a.eps;
    a.cos_t = rabi / a.eps;
    return a;
  }

  /// Same angle parametrized by theta at fixed G (used for theta scans).
  static PolaritonAngle from_theta(double theta, double coupling) {
    PolaritonAngle a;
    a.theta = theta;
    a.sin_t = std::sin(theta);
    a.cos_t = std::cos(theta);
    a.eps = coupling / a.sin_t;
    return a;
  }
};

/// Excitation-graded operator: one rectangular block per domain sector,
/// each mapping sector M to sector M + shift.  Families compose like
/// matrices; binary operations keep the intersection of defined blocks, so
/// asking for a block near the top of a finite chain fails loudly rather
/// than silently truncating.
class OperatorFamily {
 public:
  OperatorFamily() = default;
  OperatorFamily(int shift, std::map<int, SparseOperator> blocks)
      : shift_(shift), blocks_(std::move(blocks)) {}

  int shift() const { return shift_; }
  bool has_block(int m) const { return blocks_.count(m) > 0; }
  const std::map<int, SparseOperator>& blocks() const { return blocks_; }

  const SparseOperator& block(int m) const {
    auto it = blocks_.find(m);
    if (it == blocks_.end())
      throw std::out_of_range("OperatorFamily: no block for sector M=" + std::to_string(m));
    return it->second;
  }

  StateVector apply(const StateVector& x) const {
    return block(x.sector()->excitation()).apply(x);
  }

  friend OperatorFamily operator*(const OperatorFamily& x, const OperatorFamily& y) {
    std::map<int, SparseOperator> out;
    for (const auto& [m, by] : y.blocks_)
      if (x.has_block(m + y.shift_)) out.emplace(m, op_mul(x.block(m + y.shift_), by));
    return OperatorFamily(x.shift_ + y.shift_, std::move(out));
  }

  friend OperatorFamily operator+(const OperatorFamily& x, const OperatorFamily& y) {
    if (x.shift_ != y.shift_) throw std::invalid_argument("OperatorFamily: shift mismatch in sum");
    std::map<int, SparseOperator> out;
    for (const auto& [m, bx] : x.blocks_)
      if (y.has_block(m)) out.emplace(m, op_add(bx, y.block(m)));
    return OperatorFamily(x.shift_, std::move(out));
  }

  friend OperatorFamily operator-(const OperatorFamily& x, const OperatorFamily& y) {
    return x + (-1.0) * y;
  }

  friend OperatorFamily operator*(Complex z, const OperatorFamily& x) {
    std::map<int, SparseOperator> out;
    for (const auto& [m, b] : x.blocks_) out.emplace(m, op_scale(z, b));
    return OperatorFamily(x.shift_, std::move(out));
  }

  OperatorFamily adjoint() const {
    std::map<int, SparseOperator> out;
    for (const auto& [m, b] : blocks_) out.emplace(m + shift_, op_adjoint(b));
    return OperatorFamily(-shift_, std::move(out));
  }

  friend OperatorFamily commutator(const OperatorFamily& x, const OperatorFamily& y) {
    return x * y - y * x;
  }

 private:
  int shift_ = 0;
  std::map<int, SparseOperator> blocks_;
};

/// The collective operators on one sector chain.  T_plus/T_minus/T3 square
/// within a sector; the mode operators are rectangular.
struct OperatorSet {
  Flavor flavor;
  ModelParams params;
  SectorChain chain;
  OperatorFamily ph_low, ph_raise;      // a, a^dag
  OperatorFamily exc_a_low, exc_a_raise;  // A, A^dag
  OperatorFamily exc_c_low, exc_c_raise;  // C, C^dag
  OperatorFamily t_plus, t_minus, t3;
  OperatorFamily num_ph, num_a, num_c;  // occupation observables
};

namespace detail {

template <typename Elem>
OperatorFamily make_family(const SectorChain& chain, int shift, Elem&& elem) {
  // elem(state) -> pair{image state, amplitude}; zero amplitude entries skipped
  std::map<int, SparseOperator> blocks;
  for (int m = -1; m <= chain.m_max(); ++m) {
    if (!chain.has(m + shift)) continue;
    const SectorPtr& dom = chain.at(m);
    const SectorPtr& cod = chain.at(m + shift);
    std::vector<SparseOperator::Triplet> t;
    for (int c = 0; c < dom->dim(); ++c) {
      for (const auto& [img, amp] : elem(dom->state(c))) {
        if (amp == 0.0) continue;
        const int r = cod->index_of(img);
        if (r < 0) continue;  // Dicke hard wall: no matrix element
        t.push_back({r, c, amp});
      }
    }
    blocks.emplace(m, SparseOperator::from_triplets(cod, dom, std::move(t)));
  }
  return OperatorFamily(shift, std::move(blocks));
}

using Images = std::vector<std::pair<BasisState, Complex>>;

}  // namespace detail

/// Build all collective operators on the chain.
///
/// Bosonic matrix elements are canonical (sqrt(n) factors); Dicke matrix
/// elements act on symmetric states of N atoms:
///   A^dag |n_ph,n_a,n_c> = sqrt((n_a+1)(N-n_a-n_c)/N) |n_ph,n_a+1,n_c>
/// and analogously for C^dag, with the hard wall n_a + n_c <= N realized
/// as an absent matrix element.
inline OperatorSet build_operators(Flavor flavor, const ModelParams& params,
                                   const SectorChain& chain) {
  params.validate(flavor);
  if (chain.flavor() != flavor)
    throw std::invalid_argument("build_operators: chain flavor mismatch");
  if (flavor == Flavor::Dicke && chain.atoms() != params.atoms)
    throw std::invalid_argument("build_operators: chain atom count mismatch");
  const double n_atoms = static_cast<double>(params.atoms);

  OperatorSet ops;
  ops.flavor = flavor;
  ops.params = params;
  ops.chain = chain;

  ops.ph_raise = detail::make_family(chain, +1, [](const BasisState& s) {
    return detail::Images{{{s.n_ph + 1, s.n_a, s.n_c}, std::sqrt(s.n_ph + 1.0)}};
  });
  ops.ph_low = detail::make_family(chain, -1, [](const BasisState& s) {
    return detail::Images{{{s.n_ph - 1, s.n_a, s.n_c}, std::sqrt(double(s.n_ph))}};
  });

  if (flavor == Flavor::Bosonic) {
    ops.exc_a_raise = detail::make_family(chain, +1, [](const BasisState& s) {
      return detail::Images{{{s.n_ph, s.n_a + 1, s.n_c}, std::sqrt(s.n_a + 1.0)}};
    });
    ops.exc_c_raise = detail::make_family(chain, +1, [](const BasisState& s) {
      return detail::Images{{{s.n_ph, s.n_a, s.n_c + 1}, std::sqrt(s.n_c + 1.0)}};
    });
  } else {
    ops.exc_a_raise = detail::make_family(chain, +1, [n_atoms](const BasisState& s) {
      const double amp = std::sqrt((s.n_a + 1.0) * (n_atoms - s.n_a - s.n_c) / n_atoms);
      return detail::Images{{{s.n_ph, s.n_a + 1, s.n_c}, amp}};
    });
    ops.exc_c_raise = detail::make_family(chain, +1, [n_atoms](const BasisState& s) {
      const double amp = std::sqrt((s.n_c + 1.0) * (n_atoms - s.n_a - s.n_c) / n_atoms);
      return detail::Images{{{s.n_ph, s.n_a, s.n_c + 1}, amp}};
    });
  }
  ops.exc_a_low = ops.exc_a_raise.adjoint();
  ops.exc_c_low = ops.exc_c_raise.adjoint();

  if (flavor == Flavor::Bosonic) {
    // algebra closure forces the bosonic image T+ = A^dag C; built directly
    // from its matrix elements so the empty-sector block survives
    ops.t_plus = detail::make_family(chain, 0, [](const BasisState& s) {
      const double amp = std::sqrt(double(s.n_c) * (s.n_a + 1.0));
      return detail::Images{{{s.n_ph, s.n_a + 1, s.n_c - 1}, amp}};
    });
    ops.t_minus = ops.t_plus.adjoint();
    // T3 has no bosonic image in the model; only the Dicke flavor carries it.
  } else {
    ops.t_plus = detail::make_family(chain, 0, [](const BasisState& s) {
      const double amp = std::sqrt(double(s.n_c) * (s.n_a + 1.0));
      return detail::Images{{{s.n_ph, s.n_a + 1, s.n_c - 1}, amp}};
    });
    ops.t_minus = ops.t_plus.adjoint();
    ops.t3 = detail::make_family(chain, 0, [](const BasisState& s) {
      return detail::Images{{s, 0.5 * (s.n_a - s.n_c)}};
    });
  }

  ops.num_ph = detail::make_family(chain, 0, [](const BasisState& s) {
    return detail::Images{{s, double(s.n_ph)}};
  });
  ops.num_a = detail::make_family(chain, 0, [](const BasisState& s) {
    return detail::Images{{s, double(s.n_a)}};
  });
  ops.num_c = detail::make_family(chain, 0, [](const BasisState& s) {
    return detail::Images{{s, double(s.n_c)}};
  });
  return ops;
}

/// Quantized-coupling part a A^dag + a^dag A (coefficient G in H).
inline OperatorFamily coupling_term(const OperatorSet& ops) {
  return ops.ph_low * ops.exc_a_raise + ops.ph_raise * ops.exc_a_low;
}

/// Classical-drive part T+ + T- (coefficient Omega in H).
inline OperatorFamily drive_term(const OperatorSet& ops) {
  return ops.t_plus + ops.t_minus;
}

/// H = G (a A^dag + a^dag A) + Omega (T+ + T-), Hermitian and
/// excitation-conserving by construction.
inline OperatorFamily build_hamiltonian(const OperatorSet& ops) {
  return Complex(ops.params.coupling) * coupling_term(ops) +
         Complex(ops.params.rabi) * drive_term(ops);
}

inline OperatorFamily build_hamiltonian(Flavor flavor, const ModelParams& params,
                                        const SectorChain& chain) {
  return build_hamiltonian(build_operators(flavor, params, chain));
}

/// Dark/bright polariton operators and the dressed ladder operators Q+-.
/// Exact only in the bosonic representation.
struct PolaritonOps {
  PolaritonAngle angle;
  SectorChain chain;
  OperatorFamily dark_low, dark_raise;      // D, D^dag
  OperatorFamily bright_low, bright_raise;  // B, B^dag
  OperatorFamily q_plus_raise, q_minus_raise, q_plus_low, q_minus_low;
};

inline PolaritonOps polariton_ops(const PolaritonAngle& angle, const OperatorSet& ops) {
  if (ops.flavor != Flavor::Bosonic)
    throw std::invalid_argument("polariton_ops: only the bosonic flavor supports polaritons");
  PolaritonOps p;
  p.angle = angle;
  p.chain = ops.chain;
  const Complex c = angle.cos_t, s = angle.sin_t;
  p.dark_low = c * ops.ph_low - s * ops.exc_c_low;
  p.bright_low = s * ops.ph_low + c * ops.exc_c_low;
  p.dark_raise = p.dark_low.adjoint();
  p.bright_raise = p.bright_low.adjoint();
  const Complex inv_sqrt2 = 1.0 / std::sqrt(2.0);
  p.q_plus_low = inv_sqrt2 * (ops.exc_a_low + p.bright_low);
  p.q_minus_low = inv_sqrt2 * (ops.exc_a_low - p.bright_low);
  p.q_plus_raise = p.q_plus_low.adjoint();
  p.q_minus_raise = p.q_minus_low.adjoint();
  return p;
}

/// One row of the algebra-relation deviation table.
struct CommutatorDeviation {
  std::string relation;
  double deviation = 0.0;  // operator 2-norm of ([X,Y] - expected) on the sector
  bool exact = false;      // relation is algebraically exact in this flavor
};

struct CommutatorReport {
  Flavor flavor;
  int sector = 0;
  std::vector<CommutatorDeviation> rows;

  double max_exact_deviation() const {
    double m = 0.0;
    for (const auto& r : rows)
      if (r.exact) m = std::max(m, r.deviation);
    return m;
  }
};

/// Deviation table for every algebra relation on one sector.  Relations
/// that are exact identities for the flavor are flagged; the remaining rows
/// quantify the finite-N corrections (the hard-wall deformation of the
/// boson algebra).
inline CommutatorReport commutator_report(Flavor flavor, const ModelParams& params, int sector) {
  if (sector < 0) throw std::invalid_argument("commutator_report: sector must be >= 0");
  SectorChain chain(flavor, sector + 2, params.atoms);
  OperatorSet ops = build_operators(flavor, params, chain);
  const bool bosonic = flavor == Flavor::Bosonic;
  const double inv_n = bosonic ? 0.0 : 1.0 / params.atoms;

  const auto& id = SparseOperator::identity(chain.at(sector));
  auto block_norm = [&](const OperatorFamily& f) {
    // a commutator whose image falls below the vacuum is identically zero
    if (!f.has_block(sector) && sector + f.shift() < -1) return 0.0;
    return f.block(sector).operator_norm();
  };

  CommutatorReport rep{flavor, sector, {}};
  auto add = [&](const std::string& name, const OperatorFamily& dev, bool exact) {
    rep.rows.push_back({name, block_norm(dev), exact});
  };

  OperatorFamily aa = commutator(ops.exc_a_low, ops.exc_a_raise);
  rep.rows.push_back({"[A,A+]-1", op_sub(aa.block(sector), id).operator_norm(), bosonic});
  OperatorFamily cc = commutator(ops.exc_c_low, ops.exc_c_raise);
  rep.rows.push_back({"[C,C+]-1", op_sub(cc.block(sector), id).operator_norm(), bosonic});
  add("[A,C]", commutator(ops.exc_a_low, ops.exc_c_low), bosonic);
  if (bosonic) {
    add("[A,C+]", commutator(ops.exc_a_low, ops.exc_c_raise), true);
  } else {
    add("[A,C+]+T-/N",
        commutator(ops.exc_a_low, ops.exc_c_raise) + Complex(inv_n) * ops.t_minus, true);
  }
  add("[T-,C]+A", commutator(ops.t_minus, ops.exc_c_low) + ops.exc_a_low, true);
  add("[T+,A]+C", commutator(ops.t_plus, ops.exc_a_low) + ops.exc_c_low, true);
  if (!bosonic) {
    add("[T+,T-]-2T3", commutator(ops.t_plus, ops.t_minus) - 2.0 * ops.t3, true);
    add("[T3,T+]-T+", commutator(ops.t3, ops.t_plus) - ops.t_plus, true);
    add("[T3,T-]+T-", commutator(ops.t3, ops.t_minus) + ops.t_minus, true);
  } else {
    // bosonic SU(2) closure through the composite images
    add("[T+,T-]-(A+A - C+C)",
        commutator(ops.t_plus, ops.t_minus) -
            (ops.exc_a_raise * ops.exc_a_low - ops.exc_c_raise * ops.exc_c_low),
        true);
  }
  return rep;
}

}  // namespace dspmem
