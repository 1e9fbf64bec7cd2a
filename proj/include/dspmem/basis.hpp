#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace dspmem {

/// Which representation a basis lives in.
///
/// Bosonic: photon mode plus two independent exciton oscillators (A, C),
/// the large-N limit of the collective model.  Dicke: photon mode plus the
/// permutation-symmetric states of N three-level atoms, labeled by the
/// number of atoms promoted to |a> and |c>.
enum class Flavor { Bosonic, Dicke };

inline const char* flavor_name(Flavor f) {
  return f == Flavor::Bosonic ? "bosonic" : "dicke";
}

/// Occupation-number label of one basis vector inside an excitation sector.
/// n_a / n_c are A-/C-oscillator quanta (Bosonic) or atom counts (Dicke).
struct BasisState {
  int n_ph = 0;
  int n_a = 0;
  int n_c = 0;

  int excitation() const { return n_ph + n_a + n_c; }

  friend bool operator==(const BasisState&, const BasisState&) = default;
};

/// Ordered basis of the M-excitation sector.  Enumeration is lexicographic
/// in (n_ph, n_a); n_c is fixed by the excitation number.  Dicke sectors
/// additionally require n_a + n_c <= N.
class SectorBasis {
 public:
  SectorBasis(Flavor flavor, int excitation, int atoms, std::vector<BasisState> states)
      : flavor_(flavor), excitation_(excitation), atoms_(atoms), states_(std::move(states)) {}

  Flavor flavor() const { return flavor_; }
  int excitation() const { return excitation_; }
  int atoms() const { return atoms_; }  // 0 for Bosonic
  int dim() const { return static_cast<int>(states_.size()); }
  const std::vector<BasisState>& states() const { return states_; }
  const BasisState& state(int i) const { return states_[i]; }

  /// Position of a state in this basis, or -1 if it is not a member.
  int index_of(const BasisState& s) const {
    if (s.n_ph < 0 || s.n_a < 0 || s.n_c < 0) return -1;
    if (s.excitation() != excitation_) return -1;
    if (flavor_ == Flavor::Dicke && s.n_a + s.n_c > atoms_) return -1;
    auto it = std::lower_bound(states_.begin(), states_.end(), s,
                               [](const BasisState& x, const BasisState& y) {
                                 if (x.n_ph != y.n_ph) return x.n_ph < y.n_ph;
                                 return x.n_a < y.n_a;
                               });
    if (it == states_.end() || !(*it == s)) return -1;
    return static_cast<int>(it - states_.begin());
  }

  bool same_as(const SectorBasis& o) const {
    return flavor_ == o.flavor_ && excitation_ == o.excitation_ && atoms_ == o.atoms_;
  }

  std::string label() const {
    std::string s = std::string(flavor_name(flavor_)) + " M=" + std::to_string(excitation_);
    if (flavor_ == Flavor::Dicke) s += " N=" + std::to_string(atoms_);
    return s;
  }

 private:
  Flavor flavor_;
  int excitation_;
  int atoms_;
  std::vector<BasisState> states_;
};

using SectorPtr = std::shared_ptr<const SectorBasis>;

/// Complete deterministically ordered basis of the M-excitation sector.
/// M == -1 is allowed and yields the empty sector (used as the codomain of
/// lowering operators acting on the vacuum sector).
inline SectorPtr enumerate_sector(Flavor flavor, int excitation, int atoms = 0) {
  if (excitation < -1) throw std::invalid_argument("enumerate_sector: M must be >= 0");
  if (flavor == Flavor::Dicke && atoms < 1)
    throw std::invalid_argument("enumerate_sector: Dicke flavor needs N >= 1");
  std::vector<BasisState> states;
  for (int n_ph = 0; n_ph <= excitation; ++n_ph) {
    for (int n_a = 0; n_a + n_ph <= excitation; ++n_a) {
      const int n_c = excitation - n_ph - n_a;
      if (flavor == Flavor::Dicke && n_a + n_c > atoms) continue;
      states.push_back({n_ph, n_a, n_c});
    }
  }
  return std::make_shared<SectorBasis>(flavor, excitation, flavor == Flavor::Dicke ? atoms : 0,
                                       std::move(states));
}

/// Sectors M = -1 .. m_max of one flavor, shared by every operator family
/// built on them.
class SectorChain {
 public:
  SectorChain() = default;
  SectorChain(Flavor flavor, int m_max, int atoms = 0)
      : flavor_(flavor), atoms_(flavor == Flavor::Dicke ? atoms : 0), m_max_(m_max) {
    if (m_max < 0) throw std::invalid_argument("SectorChain: m_max must be >= 0");
    sectors_.reserve(static_cast<size_t>(m_max) + 2);
    for (int m = -1; m <= m_max; ++m) sectors_.push_back(enumerate_sector(flavor, m, atoms));
  }

  Flavor flavor() const { return flavor_; }
  int atoms() const { return atoms_; }
  int m_max() const { return m_max_; }
  bool has(int m) const { return m >= -1 && m <= m_max_; }

  const SectorPtr& at(int m) const {
    if (!has(m)) throw std::out_of_range("SectorChain: sector M=" + std::to_string(m));
    return sectors_[static_cast<size_t>(m + 1)];
  }

 private:
  Flavor flavor_ = Flavor::Bosonic;
  int atoms_ = 0;
  int m_max_ = 0;
  std::vector<SectorPtr> sectors_;
};

}  // namespace dspmem
