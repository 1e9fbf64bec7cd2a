#pragma once

#include <Eigen/Eigenvalues>
#include <optional>
#include <sstream>

#include "dspmem/operators.hpp"

namespace dspmem {

/// (m, k, n): quanta in the Q+, Q- and dark modes.  Energy (m - k) * eps;
/// m + k + n equals the excitation number of the housing sector.
struct DressedLabel {
  int m = 0, k = 0, n = 0;

  int excitation() const { return m + k + n; }
  bool dark() const { return m == k; }
  friend bool operator==(const DressedLabel&, const DressedLabel&) = default;

  std::string str() const {
    std::ostringstream os;
    os << "(" << m << "," << k << ";" << n << ")";
    return os.str();
  }
};

inline std::vector<DressedLabel> all_labels(int sector) {
  std::vector<DressedLabel> out;
  for (int m = 0; m <= sector; ++m)
    for (int k = 0; m + k <= sector; ++k) out.push_back({m, k, sector - m - k});
  return out;
}

inline std::vector<DressedLabel> dark_labels(int sector) {
  std::vector<DressedLabel> out;
  for (int m = 0; 2 * m <= sector; ++m) out.push_back({m, m, sector - 2 * m});
  return out;
}

namespace detail {

inline double ln_factorial(int n) { return std::lgamma(n + 1.0); }

}  // namespace detail

/// Eigenstate built by ladder action on the vacuum:
///   |e(m,k;n)> = [m! k!]^{-1/2} Q+^dag^m Q-^dag^k (n!)^{-1/2} D^dag^n |0>.
/// The ladder construction (rather than an eigensolver) pins the basis
/// inside each degenerate eigenspace to the (m,k,n) labeling.
inline StateVector dressed_state(const DressedLabel& label, const PolaritonOps& pol,
                                 const SectorChain& chain) {
  if (label.m < 0 || label.k < 0 || label.n < 0)
    throw std::invalid_argument("dressed_state: negative label");
  if (label.excitation() > chain.m_max())
    throw std::out_of_range("dressed_state: sector chain too short");
  StateVector psi = StateVector::basis_vector(chain.at(0), {0, 0, 0});
  for (int i = 0; i < label.n; ++i) psi = pol.dark_raise.apply(psi);
  for (int i = 0; i < label.k; ++i) psi = pol.q_minus_raise.apply(psi);
  for (int i = 0; i < label.m; ++i) psi = pol.q_plus_raise.apply(psi);
  const double ln_norm =
      0.5 * (detail::ln_factorial(label.m) + detail::ln_factorial(label.k) +
             detail::ln_factorial(label.n));
  psi *= std::exp(-ln_norm);
  return psi;
}

/// Dressed state together with its exact theta-derivative, propagated by
/// the product rule through the ladder construction using
/// d(D^dag)/dtheta = -B^dag and d(B^dag)/dtheta = D^dag.
inline std::pair<StateVector, StateVector> dressed_state_with_derivative(
    const DressedLabel& label, const PolaritonOps& pol, const SectorChain& chain) {
  StateVector psi = StateVector::basis_vector(chain.at(0), {0, 0, 0});
  StateVector dpsi(chain.at(0));
  const Complex inv_sqrt2 = 1.0 / std::sqrt(2.0);
  auto step = [&](const OperatorFamily& op, const OperatorFamily& dop, Complex dcoeff) {
    StateVector next_d = op.apply(dpsi);
    StateVector term = dop.apply(psi);
    term *= dcoeff;
    next_d += term;
    psi = op.apply(psi);
    dpsi = std::move(next_d);
  };
  for (int i = 0; i < label.n; ++i) step(pol.dark_raise, pol.bright_raise, -1.0);
  for (int i = 0; i < label.k; ++i) step(pol.q_minus_raise, pol.dark_raise, -inv_sqrt2);
  for (int i = 0; i < label.m; ++i) step(pol.q_plus_raise, pol.dark_raise, inv_sqrt2);
  const double scale = std::exp(-0.5 * (detail::ln_factorial(label.m) +
                                        detail::ln_factorial(label.k) +
                                        detail::ln_factorial(label.n)));
  psi *= scale;
  dpsi *= scale;
  return {psi, dpsi};
}

struct SectorSpectrum {
  int sector = 0;
  std::vector<std::pair<double, int>> levels;  // (eigenvalue, multiplicity), ascending
  double max_eigen_error = 0.0;                // |lambda - (m-k) eps| worst case
  double max_residual = 0.0;                   // ||H e(m,k;n) - (m-k) eps e(m,k;n)||
  int dark_dim = 0;
  bool ok = true;
  std::string failure;
};

struct SpectrumReport {
  double coupling = 0.0, rabi = 0.0, eps = 0.0;
  std::vector<SectorSpectrum> sectors;

  bool ok() const {
    for (const auto& s : sectors)
      if (!s.ok) return false;
    return true;
  }
};

/// Diagonalize every sector up to m_max and check eigenvalues and
/// multiplicities against the (m-k) eps ladder prediction.  Eigenvalues are
/// clustered within 1e-8 * eps to separate exact degeneracy from numerical
/// splitting; cluster centers must match within 1e-10 * eps.
inline SpectrumReport verify_spectrum(const ModelParams& params, int m_max) {
  if (m_max > 10) throw std::invalid_argument("verify_spectrum: m_max > 10");
  const PolaritonAngle angle = PolaritonAngle::from_params(params.coupling, params.rabi);
  SectorChain chain(Flavor::Bosonic, m_max + 1);  // headroom for the H composites
  OperatorSet ops = build_operators(Flavor::Bosonic, params, chain);
  OperatorFamily h = build_hamiltonian(ops);
  PolaritonOps pol = polariton_ops(angle, ops);

  SpectrumReport report;
  report.coupling = params.coupling;
  report.rabi = params.rabi;
  report.eps = angle.eps;
  const double cluster_tol = 1e-8 * angle.eps;
  const double match_tol = 1e-10 * angle.eps;

  for (int sector = 0; sector <= m_max; ++sector) {
    SectorSpectrum rec;
    rec.sector = sector;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.block(sector).dense());
    const Eigen::VectorXd ev = es.eigenvalues();

    for (int i = 0; i < ev.size();) {
      int j = i;
      while (j < ev.size() && ev[j] - ev[i] <= cluster_tol) ++j;
      double center = 0.0;
      for (int t = i; t < j; ++t) center += ev[t];
      rec.levels.push_back({center / (j - i), j - i});
      i = j;
    }

    // predicted multiplicity of q*eps counts (m,k,n) with m-k = q
    std::map<int, int> predicted;
    for (const auto& l : all_labels(sector)) ++predicted[l.m - l.k];
    rec.dark_dim = static_cast<int>(dark_labels(sector).size());

    if (rec.levels.size() != predicted.size()) {
      rec.ok = false;
      rec.failure = "level count mismatch in sector M=" + std::to_string(sector);
    } else {
      auto it = predicted.begin();
      for (const auto& [value, mult] : rec.levels) {
        const double target = it->first * angle.eps;
        rec.max_eigen_error = std::max(rec.max_eigen_error, std::abs(value - target));
        if (std::abs(value - target) > match_tol || mult != it->second) {
          rec.ok = false;
          std::ostringstream os;
          os << "sector M=" << sector << ": eigenvalue " << value << " (x" << mult
             << ") vs predicted " << target << " (x" << it->second << ")";
          rec.failure = os.str();
          break;
        }
        ++it;
      }
    }

    for (const auto& l : all_labels(sector)) {
      StateVector psi = dressed_state(l, pol, chain);
      StateVector residual = h.block(sector).apply(psi);
      residual -= Complex((l.m - l.k) * angle.eps) * psi;
      rec.max_residual = std::max(rec.max_residual, residual.norm());
    }
    report.sectors.push_back(std::move(rec));
  }
  return report;
}

/// Matrix of <e(row) | d/dtheta | d(col)> over one sector, with the
/// dark-dark block reported separately from the dark-bright block.
struct ConnectionMatrix {
  double theta = 0.0;
  double delta = 0.0;  // 0 for the analytic route
  int sector = 0;
  std::vector<DressedLabel> row_labels;  // all dressed states of the sector
  std::vector<DressedLabel> col_labels;  // dark states only
  Eigen::MatrixXcd entries;

  double max_dark_dark() const {
    double m = 0.0;
    for (int r = 0; r < entries.rows(); ++r)
      if (row_labels[static_cast<size_t>(r)].dark())
        for (int c = 0; c < entries.cols(); ++c) m = std::max(m, std::abs(entries(r, c)));
    return m;
  }

  double max_dark_bright() const {
    double m = 0.0;
    for (int r = 0; r < entries.rows(); ++r)
      if (!row_labels[static_cast<size_t>(r)].dark())
        for (int c = 0; c < entries.cols(); ++c) m = std::max(m, std::abs(entries(r, c)));
    return m;
  }

  std::optional<Complex> entry(const DressedLabel& row, const DressedLabel& col) const {
    for (int r = 0; r < entries.rows(); ++r)
      if (row_labels[static_cast<size_t>(r)] == row)
        for (int c = 0; c < entries.cols(); ++c)
          if (col_labels[static_cast<size_t>(c)] == col) return entries(r, c);
    return std::nullopt;
  }
};

enum class ConnectionMethod { CentralDifference, Analytic };

/// delta is the central finite-difference step; ignored by the analytic
/// route, which differentiates the ladder construction exactly and serves
/// as the independent cross-check.
inline ConnectionMatrix connection_matrix(double coupling, double theta, int sector, double delta,
                                          ConnectionMethod method = ConnectionMethod::CentralDifference) {
  if (method == ConnectionMethod::CentralDifference && (delta < 1e-6 || delta > 1e-4))
    throw std::invalid_argument("connection_matrix: delta must lie in [1e-6, 1e-4]");
  SectorChain chain(Flavor::Bosonic, sector);
  ModelParams params;  // operators themselves are parameter-free in the bosonic flavor
  OperatorSet ops = build_operators(Flavor::Bosonic, params, chain);

  ConnectionMatrix out;
  out.theta = theta;
  out.delta = method == ConnectionMethod::CentralDifference ? delta : 0.0;
  out.sector = sector;
  out.row_labels = all_labels(sector);
  out.col_labels = dark_labels(sector);
  out.entries.resize(static_cast<long>(out.row_labels.size()),
                     static_cast<long>(out.col_labels.size()));

  PolaritonOps pol = polariton_ops(PolaritonAngle::from_theta(theta, coupling), ops);
  std::vector<StateVector> rows;
  rows.reserve(out.row_labels.size());
  for (const auto& l : out.row_labels) rows.push_back(dressed_state(l, pol, chain));

  for (size_t c = 0; c < out.col_labels.size(); ++c) {
    StateVector deriv(chain.at(sector));
    if (method == ConnectionMethod::CentralDifference) {
      PolaritonOps plus = polariton_ops(PolaritonAngle::from_theta(theta + delta, coupling), ops);
      PolaritonOps minus = polariton_ops(PolaritonAngle::from_theta(theta - delta, coupling), ops);
      deriv = dressed_state(out.col_labels[c], plus, chain);
      deriv -= dressed_state(out.col_labels[c], minus, chain);
      deriv *= Complex(1.0 / (2.0 * delta));
    } else {
      deriv = dressed_state_with_derivative(out.col_labels[c], pol, chain).second;
    }
    for (size_t r = 0; r < out.row_labels.size(); ++r)
      out.entries(static_cast<long>(r), static_cast<long>(c)) = inner(rows[r], deriv);
  }
  return out;
}

/// Orthogonal projector onto span{ |d(m,n)> : 2m + n = M }.
inline SparseOperator dark_projector(const PolaritonAngle& angle, const OperatorSet& ops,
                                     const SectorChain& chain, int sector) {
  PolaritonOps pol = polariton_ops(angle, ops);
  const SectorPtr& basis = chain.at(sector);
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(basis->dim(), basis->dim());
  for (const auto& l : dark_labels(sector)) {
    const Eigen::VectorXcd v = dressed_state(l, pol, chain).amps();
    p += v * v.adjoint();
  }
  std::vector<SparseOperator::Triplet> t;
  for (int r = 0; r < basis->dim(); ++r)
    for (int c = 0; c < basis->dim(); ++c)
      if (std::abs(p(r, c)) > kZeroDrop) t.push_back({r, c, p(r, c)});
  return SparseOperator::from_triplets(basis, basis, std::move(t));
}

}  // namespace dspmem
