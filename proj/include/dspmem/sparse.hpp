#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dspmem/basis.hpp"

namespace dspmem {

using Complex = std::complex<double>;

/// Entries smaller than this in magnitude are dropped from sparse storage.
inline constexpr double kZeroDrop = 1e-15;

class SparseOperator;

/// Normalized (or decaying) quantum state on one sector basis.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(SectorPtr sector)
      : sector_(std::move(sector)), amps_(Eigen::VectorXcd::Zero(sector_->dim())) {}
  StateVector(SectorPtr sector, Eigen::VectorXcd amps)
      : sector_(std::move(sector)), amps_(std::move(amps)) {
    if (amps_.size() != sector_->dim())
      throw std::invalid_argument("StateVector: amplitude count != sector dimension");
  }

  /// Single basis state with amplitude 1.
  static StateVector basis_vector(SectorPtr sector, const BasisState& s) {
    StateVector v(sector);
    const int i = sector_index(*v.sector_, s);
    v.amps_[i] = 1.0;
    return v;
  }

  const SectorPtr& sector() const { return sector_; }
  int dim() const { return static_cast<int>(amps_.size()); }
  const Eigen::VectorXcd& amps() const { return amps_; }
  Eigen::VectorXcd& amps() { return amps_; }
  Complex operator[](int i) const { return amps_[i]; }

  double norm() const { return amps_.norm(); }

  StateVector normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::runtime_error("StateVector: cannot normalize zero vector");
    return StateVector(sector_, amps_ / n);
  }

  StateVector& operator+=(const StateVector& o) {
    check_sector(o);
    amps_ += o.amps_;
    return *this;
  }
  StateVector& operator-=(const StateVector& o) {
    check_sector(o);
    amps_ -= o.amps_;
    return *this;
  }
  StateVector& operator*=(Complex z) {
    amps_ *= z;
    return *this;
  }
  friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
  friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
  friend StateVector operator*(Complex z, StateVector a) { return a *= z; }

  void check_sector(const StateVector& o) const {
    if (!sector_ || !o.sector_ || !sector_->same_as(*o.sector_))
      throw std::invalid_argument("StateVector: sector mismatch");
  }

 private:
  static int sector_index(const SectorBasis& b, const BasisState& s) {
    const int i = b.index_of(s);
    if (i < 0) throw std::invalid_argument("StateVector: state not in sector " + b.label());
    return i;
  }

  SectorPtr sector_;
  Eigen::VectorXcd amps_;
};

/// Conjugate-linear in the first argument.
inline Complex inner(const StateVector& x, const StateVector& y) {
  x.check_sector(y);
  return x.amps().dot(y.amps());
}

inline double norm(const StateVector& x) { return x.norm(); }

/// Complex sparse matrix mapping one sector's basis into another's (CSR).
/// Raising/lowering operators are genuinely rectangular sector-to-sector
/// maps; square operators have dom == cod.
class SparseOperator {
 public:
  struct Triplet {
    int row, col;
    Complex val;
  };

  SparseOperator() = default;

  /// Zero operator of the given shape.
  SparseOperator(SectorPtr codomain, SectorPtr domain)
      : dom_(std::move(domain)), cod_(std::move(codomain)),
        row_start_(static_cast<size_t>(cod_->dim()) + 1, 0) {}

  static SparseOperator from_triplets(SectorPtr codomain, SectorPtr domain,
                                      std::vector<Triplet> t) {
    SparseOperator op(std::move(codomain), std::move(domain));
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
      if (a.row != b.row) return a.row < b.row;
      return a.col < b.col;
    });
    op.row_start_.assign(static_cast<size_t>(op.rows()) + 1, 0);
    for (size_t i = 0; i < t.size();) {
      size_t j = i;
      Complex v = 0.0;
      while (j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col) v += t[j++].val;
      if (std::abs(v) > kZeroDrop) {
        if (t[i].row < 0 || t[i].row >= op.rows() || t[i].col < 0 || t[i].col >= op.cols())
          throw std::out_of_range("SparseOperator: triplet out of range");
        op.cols_.push_back(t[i].col);
        op.vals_.push_back(v);
        ++op.row_start_[static_cast<size_t>(t[i].row) + 1];
      }
      i = j;
    }
    for (size_t r = 1; r < op.row_start_.size(); ++r) op.row_start_[r] += op.row_start_[r - 1];
    return op;
  }

  static SparseOperator identity(const SectorPtr& sector) {
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(sector->dim()));
    for (int i = 0; i < sector->dim(); ++i) t.push_back({i, i, 1.0});
    return from_triplets(sector, sector, std::move(t));
  }

  const SectorPtr& domain() const { return dom_; }
  const SectorPtr& codomain() const { return cod_; }
  int rows() const { return cod_->dim(); }
  int cols() const { return dom_->dim(); }
  int nnz() const { return static_cast<int>(vals_.size()); }
  bool square() const { return dom_->same_as(*cod_); }

  StateVector apply(const StateVector& x) const {
    if (!x.sector()->same_as(*dom_))
      throw std::invalid_argument("SparseOperator::apply: sector mismatch");
    StateVector y(cod_);
    apply_add(1.0, x.amps(), y.amps());
    return y;
  }

  /// y += coeff * (*this) * x, no shape checks beyond sizes.  Hot path of
  /// the integrator.
  void apply_add(Complex coeff, const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
    for (int r = 0; r < rows(); ++r) {
      Complex acc = 0.0;
      for (int k = row_start_[static_cast<size_t>(r)]; k < row_start_[static_cast<size_t>(r) + 1]; ++k)
        acc += vals_[static_cast<size_t>(k)] * x[cols_[static_cast<size_t>(k)]];
      y[r] += coeff * acc;
    }
  }

  Eigen::MatrixXcd dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows(), cols());
    for (int r = 0; r < rows(); ++r)
      for (int k = row_start_[static_cast<size_t>(r)]; k < row_start_[static_cast<size_t>(r) + 1]; ++k)
        m(r, cols_[static_cast<size_t>(k)]) += vals_[static_cast<size_t>(k)];
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const Complex& v : vals_) s += std::norm(v);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const Complex& v : vals_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Largest singular value (dense computation; sector dims are small).
  double operator_norm() const {
    if (rows() == 0 || cols() == 0) return 0.0;
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(dense()).singularValues()(0);
  }

  std::vector<Triplet> triplets() const {
    std::vector<Triplet> t;
    t.reserve(vals_.size());
    for (int r = 0; r < rows(); ++r)
      for (int k = row_start_[static_cast<size_t>(r)]; k < row_start_[static_cast<size_t>(r) + 1]; ++k)
        t.push_back({r, cols_[static_cast<size_t>(k)], vals_[static_cast<size_t>(k)]});
    return t;
  }

 private:
  SectorPtr dom_, cod_;
  std::vector<int> row_start_;
  std::vector<int> cols_;
  std::vector<Complex> vals_;
};

inline void check_same_shape(const SparseOperator& x, const SparseOperator& y) {
  if (!x.domain()->same_as(*y.domain()) || !x.codomain()->same_as(*y.codomain()))
    throw std::invalid_argument("SparseOperator: shape mismatch");
}

inline SparseOperator op_add(const SparseOperator& x, const SparseOperator& y) {
  check_same_shape(x, y);
  auto t = x.triplets();
  auto ty = y.triplets();
  t.insert(t.end(), ty.begin(), ty.end());
  return SparseOperator::from_triplets(x.codomain(), x.domain(), std::move(t));
}

inline SparseOperator op_scale(Complex z, const SparseOperator& x) {
  auto t = x.triplets();
  for (auto& e : t) e.val *= z;
  return SparseOperator::from_triplets(x.codomain(), x.domain(), std::move(t));
}

inline SparseOperator op_sub(const SparseOperator& x, const SparseOperator& y) {
  return op_add(x, op_scale(-1.0, y));
}

/// Matrix product x * y (apply y first).
inline SparseOperator op_mul(const SparseOperator& x, const SparseOperator& y) {
  if (!y.codomain()->same_as(*x.domain()))
    throw std::invalid_argument("op_mul: inner sector mismatch");
  std::vector<SparseOperator::Triplet> out;
  const auto tx = x.triplets();
  // group x's entries by column for the contraction
  std::vector<std::vector<std::pair<int, Complex>>> by_col(static_cast<size_t>(x.cols()));
  for (const auto& e : tx) by_col[static_cast<size_t>(e.col)].push_back({e.row, e.val});
  for (const auto& ey : y.triplets())
    for (const auto& [r, vx] : by_col[static_cast<size_t>(ey.row)])
      out.push_back({r, ey.col, vx * ey.val});
  return SparseOperator::from_triplets(x.codomain(), y.domain(), std::move(out));
}

inline SparseOperator op_adjoint(const SparseOperator& x) {
  std::vector<SparseOperator::Triplet> t;
  for (const auto& e : x.triplets()) t.push_back({e.col, e.row, std::conj(e.val)});
  return SparseOperator::from_triplets(x.domain(), x.codomain(), std::move(t));
}

/// XY - YX; requires both products to exist and have equal shape.
inline SparseOperator op_commutator(const SparseOperator& x, const SparseOperator& y) {
  return op_sub(op_mul(x, y), op_mul(y, x));
}

inline StateVector apply(const SparseOperator& op, const StateVector& x) { return op.apply(x); }

}  // namespace dspmem
