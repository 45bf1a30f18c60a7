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

#pragma once

// Model Hamiltonians, coupling operators and lattice geometry.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dissiprep/densemath.hpp"

namespace dissiprep {

// Largest number of qubits materialized as a dense Hamiltonian.
inline constexpr int kMaxDenseQubits = 10;

// Open one-dimensional chain of n_sites sites of dimension local_dim each.
struct LatticeGeometry {
  int n_sites = 1;
  int local_dim = 2;

  static LatticeGeometry chain(int n_sites, int local_dim = 2);

  int distance(int j, int k) const;
  // Sites k with distance(j, k) <= r, ascending.
  std::vector<int> ball(int j, int r) const;
  // Largest distance from j to any site.
  int radius_from(int j) const;
  std::vector<int> dims() const;
  Index hilbert_dim() const;
};

enum class Pauli : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

Pauli pauli_from_char(char c);
ComplexMatrix pauli_matrix(Pauli p);

struct PauliString {
  Complex coefficient{1.0, 0.0};
  std::map<int, Pauli> letters;  // identity sites omitted

  // Parses "X0 Z2"; an empty string is the identity.
  static PauliString parse(Complex coefficient, const std::string& text);
  std::string to_string() const;
};

struct HamiltonianSpec {
  LatticeGeometry geometry;
  std::vector<PauliString> terms;
  ComplexMatrix dense;
  std::optional<double> gap_hint;
  std::optional<double> norm_hint;

  Index dim() const { return dense.rows(); }
  // Upper bound on the spectral norm: norm_hint if present, else exact.
  double norm_bound() const;
};

ComplexMatrix pauli_site_operator(const LatticeGeometry& geometry, int site, Pauli letter);
ComplexMatrix pauli_string_operator(const LatticeGeometry& geometry, const PauliString& term);

// Smallest eigenvalue spacing above the ground energy.
double exact_gap(const EigenDecomposition& eig);

// Assembles the dense matrix and fills missing hints: gap_hint as 0.9 times
// the exact gap and norm_hint as the sum of absolute coefficients.
HamiltonianSpec from_pauli_terms(const LatticeGeometry& geometry, std::vector<PauliString> terms,
                                 std::optional<double> gap_hint = std::nullopt);
// Wraps an arbitrary Hermitian matrix; norm_hint is its spectral radius.
HamiltonianSpec from_dense(const ComplexMatrix& h, std::optional<double> gap_hint = std::nullopt);

// H = -g sum Z_i - J sum X_i X_{i+1}, open boundary.
HamiltonianSpec tfim_chain(int n, double g, double J);

// Sum over every window of k consecutive sites of all non-identity Pauli
// strings supported in the window, coefficients uniform in [-1, 1].
HamiltonianSpec random_local_hamiltonian(const LatticeGeometry& geometry, int k, std::uint64_t seed);

// Entries with independent standard normal real and imaginary parts.
ComplexMatrix random_matrix(Index rows, Index cols, std::uint64_t seed);
// Random Hermitian matrix (M + M^dagger) / 2 from random_matrix.
ComplexMatrix random_hermitian(Index dim, std::uint64_t seed);
// Haar-random unit vector.
ComplexVector haar_state(Index dim, std::uint64_t seed);

}  // namespace dissiprep
