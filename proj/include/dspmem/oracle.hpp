#pragma once

#include <Eigen/Dense>
#include <functional>

#include "dspmem/operators.hpp"

namespace dspmem {

/// Brute-force representation on the full tensor product
/// Fock(photon, cutoff) x (C^3)^N, with one 3-level system per lattice site
/// (levels 0 = ground, 1 = excited a, 2 = metastable c).  Grounds every
/// collective matrix element independently of the symmetric-sector
/// construction.  All spatial phases are set to unity; symmetric-sector
/// matrix elements do not depend on them.
class TensorOracle {
 public:
  using Vec = Eigen::VectorXcd;

  TensorOracle(int atoms, int photon_cutoff) : atoms_(atoms), cutoff_(photon_cutoff) {
    if (atoms < 1 || photon_cutoff < 0) throw std::invalid_argument("TensorOracle: bad sizes");
    if (atoms > 6) throw std::length_error("TensorOracle: N > 6 exceeds the resource limit");
    adim_ = 1;
    for (int j = 0; j < atoms_; ++j) adim_ *= 3;
    dim_ = static_cast<long>(cutoff_ + 1) * adim_;
  }

  int atoms() const { return atoms_; }
  long dim() const { return dim_; }

  /// sum_j |to><from|_j on the atomic part.
  Vec site_transfer_sum(int to_level, int from_level, const Vec& x) const {
    Vec y = Vec::Zero(dim_);
    std::vector<int> digits(static_cast<size_t>(atoms_));
    for (long i = 0; i < dim_; ++i) {
      if (x[i] == Complex(0.0)) continue;
      long a = i % adim_;
      const long ph = i - a;
      for (int j = 0; j < atoms_; ++j) {
        digits[static_cast<size_t>(j)] = static_cast<int>(a % 3);
        a /= 3;
      }
      long stride = 1;
      for (int j = 0; j < atoms_; ++j, stride *= 3)
        if (digits[static_cast<size_t>(j)] == from_level)
          y[ph + (i % adim_) + (to_level - from_level) * stride] += x[i];
    }
    return y;
  }

  Vec photon_low(const Vec& x) const {
    Vec y = Vec::Zero(dim_);
    for (long i = adim_; i < dim_; ++i)
      y[i - adim_] += std::sqrt(double(i / adim_)) * x[i];
    return y;
  }

  Vec photon_raise(const Vec& x) const {
    Vec y = Vec::Zero(dim_);
    for (long i = 0; i < dim_ - adim_; ++i)
      y[i + adim_] += std::sqrt(double(i / adim_) + 1.0) * x[i];
    return y;
  }

  Vec collective_A(const Vec& x) const {
    return site_transfer_sum(0, 1, x) / std::sqrt(double(atoms_));
  }
  Vec collective_A_dag(const Vec& x) const {
    return site_transfer_sum(1, 0, x) / std::sqrt(double(atoms_));
  }
  Vec collective_C(const Vec& x) const {
    return site_transfer_sum(0, 2, x) / std::sqrt(double(atoms_));
  }
  Vec collective_C_dag(const Vec& x) const {
    return site_transfer_sum(2, 0, x) / std::sqrt(double(atoms_));
  }
  Vec t_minus(const Vec& x) const { return site_transfer_sum(2, 1, x); }
  Vec t_plus(const Vec& x) const { return site_transfer_sum(1, 2, x); }
  Vec t3(const Vec& x) const {
    return 0.5 * (site_transfer_sum(1, 1, x) - site_transfer_sum(2, 2, x));
  }

  /// H = G a A^dag + Omega T+ + h.c. with G = g sqrt(N).
  Vec hamiltonian(const ModelParams& p, const Vec& x) const {
    Vec y = p.coupling * (photon_low(collective_A_dag(x)) + photon_raise(collective_A(x)));
    y += p.rabi * (t_plus(x) + t_minus(x));
    return y;
  }

  Eigen::MatrixXcd dense_hamiltonian(const ModelParams& p) const {
    Eigen::MatrixXcd h(dim_, dim_);
    Vec e = Vec::Zero(dim_);
    for (long c = 0; c < dim_; ++c) {
      e[c] = 1.0;
      h.col(c) = hamiltonian(p, e);
      e[c] = 0.0;
    }
    return h;
  }

  /// Normalized permutation-symmetric state with the given occupation label.
  Vec embed(const BasisState& s) const {
    if (s.n_ph < 0 || s.n_ph > cutoff_ || s.n_a < 0 || s.n_c < 0 || s.n_a + s.n_c > atoms_)
      throw std::invalid_argument("TensorOracle::embed: label outside the space");
    Vec y = Vec::Zero(dim_);
    long count = 0;
    for (long a = 0; a < adim_; ++a) {
      long v = a;
      int na = 0, nc = 0;
      for (int j = 0; j < atoms_; ++j) {
        const int d = static_cast<int>(v % 3);
        v /= 3;
        na += d == 1;
        nc += d == 2;
      }
      if (na == s.n_a && nc == s.n_c) {
        y[static_cast<long>(s.n_ph) * adim_ + a] = 1.0;
        ++count;
      }
    }
    return y / std::sqrt(double(count));
  }

  /// <embed(cod_r)| op |embed(dom_c)> over two Dicke sector bases.
  Eigen::MatrixXcd symmetric_matrix(const std::function<Vec(const Vec&)>& op,
                                    const SectorBasis& codomain, const SectorBasis& domain) const {
    Eigen::MatrixXcd m(codomain.dim(), domain.dim());
    std::vector<Vec> cod_states;
    cod_states.reserve(static_cast<size_t>(codomain.dim()));
    for (int r = 0; r < codomain.dim(); ++r) cod_states.push_back(embed(codomain.state(r)));
    for (int c = 0; c < domain.dim(); ++c) {
      const Vec img = op(embed(domain.state(c)));
      for (int r = 0; r < codomain.dim(); ++r) m(r, c) = cod_states[static_cast<size_t>(r)].dot(img);
    }
    return m;
  }

 private:
  int atoms_;
  int cutoff_;
  long adim_ = 0;
  long dim_ = 0;
};

}  // namespace dspmem
