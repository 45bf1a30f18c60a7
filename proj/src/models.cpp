// Copyright 2026 The dissiprep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dissiprep/models.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace dissiprep {

LatticeGeometry LatticeGeometry::chain(int n_sites, int local_dim) {
  if (n_sites < 1) throw ParameterError("chain: n_sites must be >= 1");
  if (local_dim < 1) throw ParameterError("chain: local_dim must be >= 1");
  return LatticeGeometry{n_sites, local_dim};
}

int LatticeGeometry::distance(int j, int k) const {
  if (j < 0 || j >= n_sites || k < 0 || k >= n_sites) {
    throw DimensionError("distance: site out of range");
  }
  return std::abs(j - k);
}

std::vector<int> LatticeGeometry::ball(int j, int r) const {
  if (r < 0) throw ParameterError("ball: radius must be nonnegative");
  std::vector<int> out;
  for (int k = 0; k < n_sites; ++k) {
    if (distance(j, k) <= r) out.push_back(k);
  }
  return out;
}

int LatticeGeometry::radius_from(int j) const {
  return std::max(distance(j, 0), distance(j, n_sites - 1));
}

std::vector<int> LatticeGeometry::dims() const {
  return std::vector<int>(n_sites, local_dim);
}

Index LatticeGeometry::hilbert_dim() const {
  Index d = 1;
  for (int s = 0; s < n_sites; ++s) d *= local_dim;
  return d;
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: throw ParameterError(std::string("unknown Pauli letter '") + c + "'");
  }
}

ComplexMatrix pauli_matrix(Pauli p) {
  ComplexMatrix m(2, 2);
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -kI, kI, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

PauliString PauliString::parse(Complex coefficient, const std::string& text) {
  PauliString out;
  out.coefficient = coefficient;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    if (token.size() < 2) throw ParameterError("malformed Pauli token '" + token + "'");
    const Pauli letter = pauli_from_char(token[0]);
    int site = 0;
    try {
      std::size_t used = 0;
      site = std::stoi(token.substr(1), &used);
      if (used != token.size() - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParameterError("malformed Pauli token '" + token + "'");
    }
    if (site < 0) throw ParameterError("negative site in Pauli token '" + token + "'");
    if (out.letters.count(site)) throw ParameterError("repeated site in Pauli string '" + text + "'");
    if (letter != Pauli::I) out.letters[site] = letter;
  }
  return out;
}

std::string PauliString::to_string() const {
  std::string s;
  for (const auto& [site, letter] : letters) {
    if (!s.empty()) s += ' ';
    s += static_cast<char>(letter);
    s += std::to_string(site);
  }
  return s;
}

double HamiltonianSpec::norm_bound() const {
  if (norm_hint) return *norm_hint;
  return operator_norm(dense);
}

ComplexMatrix pauli_site_operator(const LatticeGeometry& geometry, int site, Pauli letter) {
  PauliString term;
  if (letter != Pauli::I) term.letters[site] = letter;
  if (site < 0 || site >= geometry.n_sites) {
    throw DimensionError("pauli_site_operator: site " + std::to_string(site) + " out of range");
  }
  return pauli_string_operator(geometry, term);
}

ComplexMatrix pauli_string_operator(const LatticeGeometry& geometry, const PauliString& term) {
  if (geometry.local_dim != 2) throw DimensionError("Pauli operators require qubit sites");
  if (geometry.n_sites > kMaxDenseQubits) {
    throw DimensionError("pauli_string_operator: " + std::to_string(geometry.n_sites) +
                         " qubits exceeds the dense limit of " + std::to_string(kMaxDenseQubits));
  }
  for (const auto& [site, letter] : term.letters) {
    if (site >= geometry.n_sites) {
      throw DimensionError("Pauli string site " + std::to_string(site) + " out of range");
    }
  }
  ComplexMatrix out = ComplexMatrix::Identity(1, 1) * term.coefficient;
  for (int s = 0; s < geometry.n_sites; ++s) {
    auto it = term.letters.find(s);
    out = kron(out, pauli_matrix(it == term.letters.end() ? Pauli::I : it->second));
  }
  return out;
}

double exact_gap(const EigenDecomposition& eig) {
  if (eig.eigenvalues.size() < 2) return 0.0;
  return eig.eigenvalues(1) - eig.eigenvalues(0);
}

namespace {

void fill_gap_hint(HamiltonianSpec& spec, std::optional<double> gap_hint) {
  const EigenDecomposition eig = eig_hermitian(spec.dense);
  const double gap = exact_gap(eig);
  if (gap_hint) {
    if (*gap_hint < 0.0) throw ParameterError("gap_hint must be nonnegative");
    if (gap < *gap_hint - 1e-12 * std::max(1.0, std::abs(*gap_hint))) {
      throw ParameterError("gap_hint " + std::to_string(*gap_hint) + " exceeds the exact gap " +
                           std::to_string(gap));
    }
    spec.gap_hint = gap_hint;
  } else {
    spec.gap_hint = 0.9 * gap;
  }
}

}  // namespace

HamiltonianSpec from_pauli_terms(const LatticeGeometry& geometry, std::vector<PauliString> terms,
                                 std::optional<double> gap_hint) {
  const Index d = geometry.hilbert_dim();
  HamiltonianSpec spec;
  spec.geometry = geometry;
  spec.dense = ComplexMatrix::Zero(d, d);
  double norm = 0.0;
  for (const auto& t : terms) {
    spec.dense += pauli_string_operator(geometry, t);
    norm += std::abs(t.coefficient);
  }
  if (hermiticity_defect(spec.dense) > tol::kHermitian) {
    throw DomainError("Hamiltonian terms do not form a Hermitian operator");
  }
  spec.dense = hermitian_part(spec.dense);
  spec.terms = std::move(terms);
  spec.norm_hint = norm;
  fill_gap_hint(spec, gap_hint);
  return spec;
}

HamiltonianSpec from_dense(const ComplexMatrix& h, std::optional<double> gap_hint) {
  if (h.rows() != h.cols() || h.rows() == 0) throw DimensionError("from_dense: matrix must be square");
  if (hermiticity_defect(h) > tol::kHermitianInput * std::max(1.0, max_abs(h))) {
    throw DomainError("from_dense: matrix is not Hermitian");
  }
  HamiltonianSpec spec;
  const Index d = h.rows();
  int qubits = 0;
  while ((Index{1} << qubits) < d) ++qubits;
  spec.geometry = (Index{1} << qubits) == d && d > 1
                      ? LatticeGeometry::chain(qubits, 2)
                      : LatticeGeometry::chain(1, static_cast<int>(d));
  spec.dense = hermitian_part(h);
  const EigenDecomposition eig = eig_hermitian(spec.dense);
  spec.norm_hint = std::max(std::abs(eig.eigenvalues(0)), std::abs(eig.eigenvalues(d - 1)));
  fill_gap_hint(spec, gap_hint);
  return spec;
}

HamiltonianSpec tfim_chain(int n, double g, double J) {
  if (n < 1) throw ParameterError("tfim_chain: n must be >= 1");
  if (n > kMaxDenseQubits) {
    throw DimensionError("tfim_chain: n = " + std::to_string(n) + " exceeds the dense limit of " +
                         std::to_string(kMaxDenseQubits));
  }
  std::vector<PauliString> terms;
  for (int i = 0; i < n; ++i) {
    PauliString t;
    t.coefficient = -g;
    t.letters[i] = Pauli::Z;
    terms.push_back(t);
  }
  for (int i = 0; i + 1 < n; ++i) {
    PauliString t;
    t.coefficient = -J;
    t.letters[i] = Pauli::X;
    t.letters[i + 1] = Pauli::X;
    terms.push_back(t);
  }
  return from_pauli_terms(LatticeGeometry::chain(n), std::move(terms));
}

HamiltonianSpec random_local_hamiltonian(const LatticeGeometry& geometry, int k, std::uint64_t seed) {
  if (k < 1 || k > geometry.n_sites) throw ParameterError("random_local_hamiltonian: need 1 <= k <= n");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  constexpr Pauli kLetters[4] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
  std::vector<PauliString> terms;
  int combos = 1;
  for (int i = 0; i < k; ++i) combos *= 4;
  for (int start = 0; start + k <= geometry.n_sites; ++start) {
    for (int code = 1; code < combos; ++code) {
      PauliString t;
      int c = code;
      for (int i = 0; i < k; ++i, c /= 4) {
        if (c % 4 != 0) t.letters[start + i] = kLetters[c % 4];
      }
      t.coefficient = coeff(rng);
      terms.push_back(std::move(t));
    }
  }
  return from_pauli_terms(geometry, std::move(terms));
}

ComplexMatrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

ComplexMatrix random_hermitian(Index dim, std::uint64_t seed) {
  return hermitian_part(random_matrix(dim, dim, seed));
}

ComplexVector haar_state(Index dim, std::uint64_t seed) {
  ComplexMatrix v = random_matrix(dim, 1, seed);
  return v.col(0) / v.norm();
}

}  // namespace dissiprep
