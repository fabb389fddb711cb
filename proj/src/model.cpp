#include "svqe/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace svqe {

void ModelParams::validate() const {
  if (sites < 2 || sites % 2 != 0) {
    throw std::invalid_argument("ModelParams: site count must be even and >= 2, got " +
                                std::to_string(sites));
  }
  if (flavors < 1) {
    throw std::invalid_argument("ModelParams: flavor count must be positive");
  }
  if (num_qubits() > kMaxQubits) {
    throw std::invalid_argument("ModelParams: N*F exceeds the supported register size");
  }
  if (static_cast<int>(mu.size()) != flavors || static_cast<int>(nu.size()) != flavors) {
    throw std::invalid_argument("ModelParams: mu and nu need exactly F entries");
  }
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("ModelParams: x must be finite and non-negative");
  }
  for (double v : mu) {
    if (!std::isfinite(v)) throw std::invalid_argument("ModelParams: non-finite mu");
  }
  for (double v : nu) {
    if (!std::isfinite(v)) throw std::invalid_argument("ModelParams: non-finite nu");
  }
}

bool ModelParams::has_flip_reflection_symmetry(double tol) const {
  for (int f = 0; f < flavors; ++f) {
    const int g = flavors - 1 - f;
    if (std::abs(nu[f] + nu[g]) > tol || std::abs(mu[f] - mu[g]) > tol) return false;
  }
  return true;
}

namespace {

PauliSum number_operator(int m, int j) {
  PauliSum n = PauliSum::single(m, j, 'Z', 0.5);
  n += PauliSum::identity(m, 0.5);
  return n;
}

// Jordan-Wigner image of c_a^dagger c_b for a < b:
// sigma+_a (prod_{a<k<b} -Z_k) sigma-_b, with sigma+- = (X +- iY)/2.
PauliSum hopping_operator(int m, int a, int b) {
  const Complex i{0.0, 1.0};
  PauliSum raise = PauliSum::single(m, a, 'X', 0.5) + PauliSum::single(m, a, 'Y', 0.5 * i);
  PauliSum lower = PauliSum::single(m, b, 'X', 0.5) + PauliSum::single(m, b, 'Y', -0.5 * i);
  PauliSum op = raise;
  for (int k = a + 1; k < b; ++k) op = op * PauliSum::single(m, k, 'Z', -1.0);
  return simplify(op * lower);
}

}  // namespace

PauliSum site_charge_operator(const ModelParams& p, int site) {
  const int m = p.num_qubits();
  PauliSum q(m);
  for (int f = 0; f < p.flavors; ++f) q += number_operator(m, p.qubit(site, f));
  if (site % 2 == 1) q += PauliSum::identity(m, -static_cast<double>(p.flavors));
  return simplify(q);
}

PauliSum build_hamiltonian(const ModelParams& p) {
  p.validate();
  const int m = p.num_qubits();
  const Complex i{0.0, 1.0};
  PauliSum w(m);

  // -ix sum (c^dag_{n,f} c_{n+1,f} - h.c.)
  if (p.x != 0.0) {
    for (int n = 0; n + 1 < p.sites; ++n) {
      for (int f = 0; f < p.flavors; ++f) {
        PauliSum hop = hopping_operator(m, p.qubit(n, f), p.qubit(n + 1, f));
        w += (hop - hop.adjoint()) * (-i * p.x);
      }
    }
  }

  for (int n = 0; n < p.sites; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    for (int f = 0; f < p.flavors; ++f) {
      w += number_operator(m, p.qubit(n, f)) * (p.mu[f] * sign + p.nu[f]);
    }
  }

  // Electric energy with l_{-1} = 0: sum_{n<N-1} (sum_{k<=n} Q_k)^2.
  PauliSum field(m);
  for (int n = 0; n + 1 < p.sites; ++n) {
    field = simplify(field + site_charge_operator(p, n));
    w += field * field;
  }
  return simplify(w);
}

PauliSum total_charge_operator(const ModelParams& p) {
  p.validate();
  PauliSum q(p.num_qubits());
  for (int n = 0; n < p.sites; ++n) q += site_charge_operator(p, n);
  return simplify(q);
}

PauliSum delta_n_operator(const ModelParams& p, int flavor) {
  p.validate();
  if (flavor < 0 || flavor >= p.flavors) {
    throw std::out_of_range("delta_n_operator: flavor index out of range");
  }
  if (p.flavors < 2) {
    throw std::out_of_range("delta_n_operator: reference flavor 1 needs F >= 2");
  }
  const int m = p.num_qubits();
  PauliSum d(m);
  for (int n = 0; n < p.sites; ++n) {
    d += PauliSum::single(m, p.qubit(n, flavor), 'Z', 0.5);
    d += PauliSum::single(m, p.qubit(n, 1), 'Z', -0.5);
  }
  return simplify(d);
}

FlipReflection::FlipReflection(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw std::invalid_argument("FlipReflection: qubit count out of range");
  }
}

std::uint64_t FlipReflection::reverse(std::uint64_t b) const {
  std::uint64_t r = 0;
  for (int q = 0; q < num_qubits_; ++q) {
    if ((b >> q) & 1U) r |= std::uint64_t{1} << (num_qubits_ - 1 - q);
  }
  return r;
}

std::uint64_t FlipReflection::map_basis(std::uint64_t b) const {
  const std::uint64_t mask = (std::uint64_t{1} << num_qubits_) - 1;
  return reverse(~b & mask);
}

std::pair<double, PauliWord> FlipReflection::conjugate(PauliWord w) const {
  // X anticommutes with Y and Z: one sign per qubit carrying a z bit.
  const double sign = (std::popcount(w.z) % 2 == 0) ? 1.0 : -1.0;
  return {sign, PauliWord{reverse(w.x), reverse(w.z)}};
}

PauliSum FlipReflection::conjugate(const PauliSum& s) const {
  if (s.num_qubits() != num_qubits_) {
    throw std::invalid_argument("FlipReflection: register size mismatch");
  }
  std::vector<PauliTerm> out;
  out.reserve(s.size());
  for (const auto& t : s.terms()) {
    auto [sign, w] = conjugate(t.word);
    out.push_back({sign * t.coeff, w});
  }
  return PauliSum(num_qubits_, std::move(out));
}

double FlipReflection::commutator_norm(const PauliSum& w) const {
  return simplify(w - conjugate(w)).one_norm();
}

double FlipReflection::sector_commutator_norm(const PauliSum& w, int weight) const {
  if (num_qubits_ > 26) throw std::invalid_argument("FlipReflection: register too large");
  const PauliSum d = simplify(w - conjugate(w));
  const std::uint64_t dim = std::uint64_t{1} << num_qubits_;
  std::vector<std::pair<std::uint64_t, Complex>> column;
  double worst = 0.0;
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (std::popcount(b) != weight) continue;
    column.clear();
    for (const auto& t : d.terms()) column.emplace_back(b ^ t.word.x, t.coeff * t.word.apply_phase(b));
    std::sort(column.begin(), column.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    double sum = 0.0;
    for (std::size_t i = 0; i < column.size();) {
      Complex acc = 0.0;
      std::size_t j = i;
      for (; j < column.size() && column[j].first == column[i].first; ++j) acc += column[j].second;
      sum += std::abs(acc);
      i = j;
    }
    worst = std::max(worst, sum);
  }
  return worst;
}

}  // namespace svqe
