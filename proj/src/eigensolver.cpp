#include "svqe/eigensolver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

namespace svqe {

SectorBasis::SectorBasis(int num_qubits, int weight) : num_qubits_(num_qubits), weight_(weight) {
  if (num_qubits < 1 || num_qubits > 30) {
    throw std::invalid_argument("SectorBasis: qubit count must be in [1, 30]");
  }
  if (weight < 0 || weight > num_qubits) {
    throw std::invalid_argument("SectorBasis: weight out of range");
  }
  const std::uint64_t dim = std::uint64_t{1} << num_qubits;
  lookup_.assign(dim, -1);
  if (weight == 0) {
    states_.push_back(0);
  } else {
    // Gosper's hack: next integer with the same popcount.
    std::uint64_t v = (std::uint64_t{1} << weight) - 1;
    while (v < dim) {
      states_.push_back(v);
      const std::uint64_t c = v & (~v + 1);
      const std::uint64_t r = v + c;
      v = (((r ^ v) >> 2) / c) | r;
    }
  }
  for (std::size_t i = 0; i < states_.size(); ++i) {
    lookup_[states_[i]] = static_cast<std::int32_t>(i);
  }
}

StateVector SectorBasis::embed(const Eigen::VectorXcd& v) const {
  if (static_cast<std::size_t>(v.size()) != states_.size()) {
    throw std::invalid_argument("SectorBasis::embed: size mismatch");
  }
  std::vector<Complex> amps(std::size_t{1} << num_qubits_, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < states_.size(); ++i) amps[states_[i]] = v[static_cast<Eigen::Index>(i)];
  return StateVector(num_qubits_, std::move(amps));
}

Eigen::VectorXcd SectorBasis::restrict(const StateVector& s) const {
  if (s.num_qubits() != num_qubits_) {
    throw std::invalid_argument("SectorBasis::restrict: dimension mismatch");
  }
  Eigen::VectorXcd v(static_cast<Eigen::Index>(states_.size()));
  for (std::size_t i = 0; i < states_.size(); ++i) v[static_cast<Eigen::Index>(i)] = s[states_[i]];
  return v;
}

SectorBasis zero_charge_sector(const ModelParams& p) {
  p.validate();
  return SectorBasis(p.num_qubits(), p.num_qubits() / 2);
}

namespace {

Complex sign_of(const PauliTerm& t, std::uint64_t b) {
  return (std::popcount(t.word.z & ~b) % 2 == 0) ? t.coeff : -t.coeff;
}

}  // namespace

SectorOperator::SectorOperator(const PauliSum& h, const SectorBasis& basis, double leak_tol)
    : basis_(&basis) {
  if (h.num_qubits() != basis.num_qubits()) {
    throw std::invalid_argument("SectorOperator: register size mismatch");
  }
  std::vector<PauliTerm> diagonal;
  std::map<std::uint64_t, std::vector<PauliTerm>> by_x;
  for (const auto& t : h.terms()) {
    PauliTerm folded{t.coeff * t.word.apply_phase(~std::uint64_t{0}), t.word};
    if (t.word.is_diagonal()) {
      diagonal.push_back(folded);
    } else {
      by_x[t.word.x].push_back(folded);
    }
  }
  const std::size_t dim = basis.size();
  diag_.assign(dim, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < dim; ++i) {
    for (const auto& t : diagonal) diag_[i] += sign_of(t, basis.state(i));
  }
  for (auto& [x, terms] : by_x) {
    double leaked = 0.0;
    bool any_in_sector = false;
    for (std::size_t i = 0; i < dim; ++i) {
      const std::uint64_t b = basis.state(i);
      if (basis.index_of(b ^ x) >= 0) {
        any_in_sector = true;
        continue;
      }
      Complex amp{0.0, 0.0};
      for (const auto& t : terms) amp += sign_of(t, b);
      leaked = std::max(leaked, std::abs(amp));
    }
    if (leaked > leak_tol) {
      throw SectorLeakageError("SectorOperator: operator leaks out of the weight-" +
                               std::to_string(basis.weight()) + " sector (amplitude " +
                               std::to_string(leaked) + ")");
    }
    if (any_in_sector) hops_.push_back({x, std::move(terms)});
  }
}

void SectorOperator::apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  const std::size_t dim = diag_.size();
  out.resize(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    out[static_cast<Eigen::Index>(i)] = diag_[i] * in[static_cast<Eigen::Index>(i)];
  }
  for (const auto& hop : hops_) {
    for (std::size_t i = 0; i < dim; ++i) {
      const std::uint64_t b = basis_->state(i);
      const std::int64_t j = basis_->index_of(b ^ hop.x);
      if (j < 0) continue;
      Complex amp{0.0, 0.0};
      for (const auto& t : hop.terms) amp += sign_of(t, b);
      out[j] += amp * in[static_cast<Eigen::Index>(i)];
    }
  }
}

Eigen::MatrixXcd SectorOperator::dense() const {
  const auto dim = static_cast<Eigen::Index>(diag_.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) m(i, i) = diag_[static_cast<std::size_t>(i)];
  for (const auto& hop : hops_) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const std::uint64_t b = basis_->state(static_cast<std::size_t>(i));
      const std::int64_t j = basis_->index_of(b ^ hop.x);
      if (j < 0) continue;
      for (const auto& t : hop.terms) m(j, i) += sign_of(t, b);
    }
  }
  return m;
}

namespace {

// Largest-magnitude component made real and positive.
void fix_phase(Eigen::VectorXcd& v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best_abs * (1.0 + 1e-12) + 1e-300) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs > 0.0) v *= std::conj(v[best]) / best_abs;
}

SpectrumResult finish(const SectorOperator& op, const SectorBasis& basis,
                      std::vector<std::pair<double, Eigen::VectorXcd>> pairs, double residual_tol) {
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  SpectrumResult r;
  Eigen::VectorXcd hv;
  for (auto& [e, v] : pairs) {
    fix_phase(v);
    op.apply(v, hv);
    const double res = (hv - e * v).norm();
    if (res > residual_tol) {
      throw ConvergenceError("ground_state: eigenpair residual " + std::to_string(res) +
                             " above tolerance");
    }
    r.energies.push_back(e);
    r.residuals.push_back(res);
    r.vectors.push_back(basis.embed(v));
  }
  return r;
}

void orthogonalize(Eigen::VectorXcd& w, const std::vector<Eigen::VectorXcd>& against) {
  // Two passes of classical Gram-Schmidt.
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : against) w -= q.dot(w) * q;
  }
}

}  // namespace

SpectrumResult lanczos_lowest(const SectorOperator& op, const SectorBasis& basis, int k,
                              const EigensolverOptions& opts) {
  const auto dim = static_cast<Eigen::Index>(op.dim());
  k = std::min<int>(k, static_cast<int>(dim));
  std::vector<Eigen::VectorXcd> locked;
  std::vector<std::pair<double, Eigen::VectorXcd>> pairs;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;

  // One pass per level: the lowest Ritz pair in the complement of the locked
  // vectors, so degenerate copies are recovered on later passes.
  for (int level = 0; level < k; ++level) {
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex{gauss(rng), gauss(rng)};
    orthogonalize(v, locked);
    v.normalize();

    std::vector<Eigen::VectorXcd> krylov{v};
    std::vector<double> alpha;
    std::vector<double> beta;
    double prev_ritz = std::numeric_limits<double>::infinity();
    Eigen::VectorXd ritz_vec;
    double ritz = 0.0;
    Eigen::VectorXcd w;
    const int cap = static_cast<int>(std::min<Eigen::Index>(opts.max_krylov, dim - level));

    for (int j = 0; j < cap; ++j) {
      op.apply(krylov[static_cast<std::size_t>(j)], w);
      orthogonalize(w, locked);
      alpha.push_back(krylov[static_cast<std::size_t>(j)].dot(w).real());
      orthogonalize(w, krylov);
      const double b = w.norm();

      const auto m = static_cast<Eigen::Index>(alpha.size());
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub(std::max<Eigen::Index>(m - 1, 0));
      for (Eigen::Index i = 0; i + 1 < m; ++i) sub[i] = beta[static_cast<std::size_t>(i)];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      ritz = tri.eigenvalues()[0];
      ritz_vec = tri.eigenvectors().col(0);
      const double resid_est = b * std::abs(ritz_vec[m - 1]);

      const bool invariant = b < 1e-13 * std::max(1.0, std::abs(ritz));
      const bool settled = std::abs(ritz - prev_ritz) < opts.ritz_tol &&
                           resid_est < 0.1 * opts.residual_tol;
      const bool exhausted = j + 1 == dim - level;
      prev_ritz = ritz;
      if (invariant || settled || exhausted) break;
      if (j + 1 == cap) {
        throw ConvergenceError("lanczos: no convergence within " +
                               std::to_string(opts.max_krylov) + " Krylov vectors");
      }
      beta.push_back(b);
      krylov.push_back(w / b);
    }

    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(dim);
    for (Eigen::Index i = 0; i < ritz_vec.size(); ++i) {
      x += ritz_vec[i] * krylov[static_cast<std::size_t>(i)];
    }
    orthogonalize(x, locked);
    x.normalize();
    op.apply(x, w);
    const double rayleigh = x.dot(w).real();
    locked.push_back(x);
    pairs.emplace_back(rayleigh, x);
  }
  return finish(op, basis, std::move(pairs), opts.residual_tol);
}

SpectrumResult ground_state(const PauliSum& h, const SectorBasis& basis, int k,
                            const EigensolverOptions& opts) {
  if (k < 1) throw std::invalid_argument("ground_state: k must be positive");
  if (!h.is_hermitian(1e-12)) {
    throw std::invalid_argument("ground_state: operator is not Hermitian");
  }
  SectorOperator op(h, basis);
  if (op.dim() > opts.dense_limit) return lanczos_lowest(op, basis, k, opts);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.dense());
  if (es.info() != Eigen::Success) throw ConvergenceError("ground_state: dense solve failed");
  const int levels = std::min<int>(k, static_cast<int>(op.dim()));
  std::vector<std::pair<double, Eigen::VectorXcd>> pairs;
  for (int i = 0; i < levels; ++i) pairs.emplace_back(es.eigenvalues()[i], es.eigenvectors().col(i));
  return finish(op, basis, std::move(pairs), opts.residual_tol);
}

namespace {

// Occupied modes strictly below `mode`.
int parity_below(std::uint64_t occ, int mode) {
  return std::popcount(occ & ((std::uint64_t{1} << mode) - 1)) % 2;
}

// c_mode |occ>; returns false when the result vanishes.
bool annihilate(std::uint64_t& occ, int mode, double& sign) {
  const std::uint64_t bit = std::uint64_t{1} << mode;
  if (!(occ & bit)) return false;
  if (parity_below(occ, mode)) sign = -sign;
  occ ^= bit;
  return true;
}

bool create(std::uint64_t& occ, int mode, double& sign) {
  const std::uint64_t bit = std::uint64_t{1} << mode;
  if (occ & bit) return false;
  if (parity_below(occ, mode)) sign = -sign;
  occ ^= bit;
  return true;
}

}  // namespace

Eigen::MatrixXcd oracle_hamiltonian(const ModelParams& p, const SectorBasis& basis) {
  p.validate();
  if (basis.num_qubits() != p.num_qubits()) {
    throw std::invalid_argument("oracle_hamiltonian: basis does not match the model");
  }
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const Complex minus_ix{0.0, -p.x};

  for (Eigen::Index col = 0; col < dim; ++col) {
    const std::uint64_t occ = basis.state(static_cast<std::size_t>(col));

    // -ix (c^dag_a c_b - c^dag_b c_a), a = (n, f), b = (n+1, f)
    for (int n = 0; n + 1 < p.sites; ++n) {
      for (int f = 0; f < p.flavors; ++f) {
        const int a = p.qubit(n, f);
        const int b = p.qubit(n + 1, f);
        for (int dir = 0; dir < 2; ++dir) {
          const int from = dir == 0 ? b : a;
          const int to = dir == 0 ? a : b;
          std::uint64_t s = occ;
          double sign = 1.0;
          if (!annihilate(s, from, sign) || !create(s, to, sign)) continue;
          const std::int64_t row = basis.index_of(s);
          if (row < 0) continue;
          h(row, col) += (dir == 0 ? 1.0 : -1.0) * sign * minus_ix;
        }
      }
    }

    double diag = 0.0;
    double field = 0.0;
    for (int n = 0; n < p.sites; ++n) {
      const double stagger = (n % 2 == 0) ? 1.0 : -1.0;
      int occupied = 0;
      for (int f = 0; f < p.flavors; ++f) {
        if ((occ >> p.qubit(n, f)) & 1U) {
          ++occupied;
          diag += p.mu[f] * stagger + p.nu[f];
        }
      }
      field += occupied - (n % 2 == 1 ? p.flavors : 0);
      if (n + 1 < p.sites) diag += field * field;
    }
    h(col, col) += diag;
  }
  return h;
}

double ground_space_overlap(const StateVector& psi, const SpectrumResult& spec,
                            double degeneracy_tol) {
  double total = 0.0;
  if (spec.energies.empty()) return total;
  const double e0 = spec.energies.front();
  for (std::size_t d = 0; d < spec.energies.size(); ++d) {
    if (spec.energies[d] - e0 > degeneracy_tol) break;
    total += overlap(spec.vectors[d], psi);
  }
  return std::min(total, 1.0);  // rounding can push a full projection past 1
}

int ground_degeneracy(const SpectrumResult& spec, double degeneracy_tol) {
  int count = 0;
  for (double e : spec.energies) {
    if (e - spec.energies.front() <= degeneracy_tol) ++count;
  }
  return count;
}

}  // namespace svqe
