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

// Dense complex linear algebra shared by every other module. Matrices are
// plain Eigen column-major matrices; all functions are pure.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dissiprep/errors.hpp"

namespace dissiprep {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

namespace tol {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-12;
inline constexpr double kPsdFloor = -1e-10;
// Looser Hermiticity check applied to inputs of eig_hermitian.
inline constexpr double kHermitianInput = 1e-10;
}  // namespace tol

// Maximum entry count produced by kron unless the caller overrides it.
inline constexpr std::size_t kDefaultEntryCap = std::size_t{1} << 26;

// A positive semidefinite, unit-trace, Hermitian matrix. Construction
// validates the invariants and throws DomainError on violation.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m);

  static DensityMatrix pure(const ComplexVector& psi);
  static DensityMatrix basis_state(Index dim, Index k);
  static DensityMatrix maximally_mixed(Index dim);
  // Hermitize, clip negative eigenvalues to zero and renormalize.
  static DensityMatrix project(const ComplexMatrix& m);
  // Hermitize and renormalize without clipping; the caller has already
  // checked the positivity floor.
  static DensityMatrix normalized(const ComplexMatrix& m);

  const ComplexMatrix& matrix() const { return mat_; }
  Index dim() const { return mat_.rows(); }

 private:
  struct Unchecked {};
  DensityMatrix(ComplexMatrix m, Unchecked) : mat_(std::move(m)) {}
  ComplexMatrix mat_;
};

struct EigenDecomposition {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // orthonormal columns
};

struct SVDResult {
  RealVector singular_values;  // descending
  ComplexMatrix left_vectors;
  ComplexMatrix right_vectors;
};

struct GeneralEigen {
  ComplexVector eigenvalues;
  ComplexMatrix right_vectors;  // empty unless requested
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t entry_cap = kDefaultEntryCap);

// Reduced operator on the subsystems listed in `keep` (in ascending order of
// subsystem index). Subsystem 0 is the leftmost Kronecker factor.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const int> dims,
                            std::span<const int> keep);

EigenDecomposition eig_hermitian(const ComplexMatrix& h);
SVDResult svd(const ComplexMatrix& t);
GeneralEigen eig_general(const ComplexMatrix& m, bool vectors);

// Scaling and squaring with a degree-13 Pade approximant.
ComplexMatrix expm(const ComplexMatrix& m);
// exp(scale * h) for Hermitian h through its eigendecomposition.
ComplexMatrix expm_hermitian(const ComplexMatrix& h, Complex scale);
ComplexMatrix expm_hermitian(const EigenDecomposition& eig, Complex scale);

// Sum of singular values.
double trace_norm(const ComplexMatrix& m);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
// Squared Uhlmann fidelity; equals <psi|a|psi> when b is pure.
double fidelity(const DensityMatrix& a, const DensityMatrix& b);
double fidelity_pure(const ComplexMatrix& rho, const ComplexVector& psi);

double operator_norm(const ComplexMatrix& m);
double max_abs(const ComplexMatrix& m);
double hermiticity_defect(const ComplexMatrix& m);
ComplexMatrix hermitian_part(const ComplexMatrix& m);
ComplexMatrix sqrt_psd(const ComplexMatrix& h);

// Column-stacking: vectorize(A X B) = kron(B^T, A) vectorize(X).
ComplexVector vectorize(const ComplexMatrix& m);
ComplexMatrix unvectorize(const ComplexVector& v);

}  // namespace dissiprep
