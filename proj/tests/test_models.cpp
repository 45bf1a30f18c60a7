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

#include <doctest.h>

#include <algorithm>

#include "dissiprep/models.hpp"
#include "oracles.hpp"

using namespace dissiprep;

TEST_SUITE("models") {

TEST_CASE("tfim spectra") {
  const RealVector a = eig_hermitian(tfim_chain(2, 1.0, 0.0).dense).eigenvalues;
  CHECK((a - Eigen::Vector4d(-2, 0, 0, 2)).norm() < 1e-12);
  const RealVector b = eig_hermitian(tfim_chain(2, 0.0, 1.0).dense).eigenvalues;
  CHECK((b - Eigen::Vector4d(-1, -1, 1, 1)).norm() < 1e-12);
  const HamiltonianSpec h4 = tfim_chain(4, 1.0, 1.0);
  const std::vector<double> ref = oracle::hermitian_eigenvalues(h4.dense);
  CHECK(std::abs(eig_hermitian(h4.dense).eigenvalues(0) - ref[0]) < 1e-10);
  CHECK_THROWS_AS(tfim_chain(kMaxDenseQubits + 1, 1.0, 1.0), DimensionError);
}

TEST_CASE("tfim spectrum is symmetric under g -> -g") {
  for (int n = 2; n <= 5; ++n) {
    const RealVector p = eig_hermitian(tfim_chain(n, 0.7, 1.0).dense).eigenvalues;
    const RealVector m = eig_hermitian(tfim_chain(n, -0.7, 1.0).dense).eigenvalues;
    CHECK((p - m).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("hints bound the exact values") {
  const HamiltonianSpec h = tfim_chain(4, 1.0, 1.0);
  const EigenDecomposition e = eig_hermitian(h.dense);
  REQUIRE(h.gap_hint.has_value());
  CHECK(*h.gap_hint <= exact_gap(e));
  CHECK(h.norm_bound() >= std::max(std::abs(e.eigenvalues(0)), std::abs(e.eigenvalues(e.eigenvalues.size() - 1))));
}

TEST_CASE("pauli site operators") {
  const LatticeGeometry two = LatticeGeometry::chain(2);
  const ComplexMatrix x0 = pauli_site_operator(two, 0, Pauli::X);
  CHECK(x0.isApprox(kron(pauli_matrix(Pauli::X), ComplexMatrix::Identity(2, 2))));
  CHECK(pauli_site_operator(LatticeGeometry::chain(1), 0, Pauli::Z).isApprox(pauli_matrix(Pauli::Z)));
  for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
    const ComplexMatrix m = pauli_site_operator(LatticeGeometry::chain(3), 1, p);
    CHECK((m * m - ComplexMatrix::Identity(8, 8)).norm() < 1e-14);
  }
}

TEST_CASE("pauli string parsing") {
  const PauliString s = PauliString::parse(Complex(2.0), "X0 Z2");
  CHECK(s.letters.size() == 2);
  CHECK(s.letters.at(2) == Pauli::Z);
  CHECK(PauliString::parse(Complex(1.0), s.to_string()).letters == s.letters);
  CHECK_THROWS(PauliString::parse(Complex(1.0), "Q1"));
  CHECK(PauliString::parse(Complex(1.0), "").letters.empty());
}

TEST_CASE("geometry") {
  const LatticeGeometry g = LatticeGeometry::chain(8);
  CHECK(g.distance(1, 5) == 4);
  CHECK(g.ball(3, 1) == std::vector<int>{2, 3, 4});
  CHECK(g.ball(0, 2) == std::vector<int>{0, 1, 2});
  CHECK(g.radius_from(3) == 4);
  CHECK(g.hilbert_dim() == 256);
}

TEST_CASE("random local hamiltonian") {
  const LatticeGeometry g = LatticeGeometry::chain(3);
  const HamiltonianSpec a = random_local_hamiltonian(g, 2, 5);
  const HamiltonianSpec b = random_local_hamiltonian(g, 2, 5);
  CHECK(a.dense == b.dense);
  CHECK(hermiticity_defect(a.dense) < 1e-14);
  const HamiltonianSpec local = random_local_hamiltonian(LatticeGeometry::chain(1), 1, 3);
  const HamiltonianSpec site0 = from_dense(kron(local.dense, ComplexMatrix::Identity(4, 4)));
  for (int k = 1; k < 3; ++k) {
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
      const ComplexMatrix o = pauli_site_operator(g, k, p);
      CHECK((site0.dense * o - o * site0.dense).norm() < 1e-14);
    }
  }
}

TEST_CASE("random matrices") {
  CHECK(random_matrix(8, 8, 7) == random_matrix(8, 8, 7));
  CHECK(random_matrix(8, 8, 7) != random_matrix(8, 8, 8));
  for (std::uint64_t seed : {5u, 7u, 9u, 11u}) {
    const RealVector s = svd(random_matrix(8, 8, seed)).singular_values;
    CHECK(s(7) > 0.0);
    CHECK(s(6) - s(7) > 1e-3);
  }
  CHECK(haar_state(6, 3).norm() == doctest::Approx(1.0));
  CHECK(haar_state(6, 3) == haar_state(6, 3));
}

}  // TEST_SUITE
