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

// Jump-operator families for ground, Gibbs, excited and singular-vector
// targets. Jumps are returned in the computational basis.

#include <optional>
#include <string>
#include <vector>

#include "dissiprep/filters.hpp"
#include "dissiprep/lindblad.hpp"
#include "dissiprep/models.hpp"

namespace dissiprep {

enum class BuildMethod { eigenbasis, quadrature };

std::string to_string(BuildMethod method);

struct JumpBuildReport {
  BuildMethod method = BuildMethod::eigenbasis;
  double annihilation_residual = 0.0;  // ||K |psi_target>||
  double S = 0.0;
  int M = 0;
  std::optional<double> mismatch_vs_eigenbasis;  // operator norm
};

struct JumpResult {
  ComplexMatrix K;
  JumpBuildReport report;
};

// Degeneracy threshold for the lowest two eigenvalues, relative to max(1, ||H||).
inline constexpr double kDegeneracyTolerance = 1e-10;

// K_ij = fhat(lambda_i - lambda_j) A_ij in the eigenbasis of eig, mapped back
// to the computational basis. Bohr frequencies within the degeneracy
// tolerance count as exactly zero. No preconditions are checked.
ComplexMatrix filtered_jump(const EigenDecomposition& eig, const ComplexMatrix& A,
                            const std::function<Complex(double)>& fhat);

// Throws DomainError on a degenerate ground state and ParameterError when
// the gap is smaller than delta.
void check_ground_gap(const EigenDecomposition& eig, double delta);

JumpResult ground_jump_eigenbasis(const HamiltonianSpec& H, const ComplexMatrix& A,
                                  const FilterSpec& filter);
JumpResult ground_jump_eigenbasis(const ComplexMatrix& H, const EigenDecomposition& eig,
                                  const ComplexMatrix& A, const FilterSpec& filter);

// sum_k w_k f(s_k) e^{iH s_k} A e^{-iH s_k}, with the propagators generated by
// a ladder of dense exponentials (no eigendecomposition).
ComplexMatrix quadrature_jump(const ComplexMatrix& H, const ComplexMatrix& A,
                              const FilterSpec& filter, const QuadratureGrid& grid);

JumpResult ground_jump_quadrature(const HamiltonianSpec& H, const ComplexMatrix& A,
                                  const FilterSpec& filter, const QuadratureGrid& grid);
JumpResult ground_jump_quadrature(const ComplexMatrix& H, const EigenDecomposition& eig,
                                  const ComplexMatrix& A, const FilterSpec& filter,
                                  const QuadratureGrid& grid);

// Transition weight rules. The *_kms variants evaluate the base rule at
// w + beta sigma^2 / 4; on a frequency grid symmetric about -beta sigma^2 / 4
// this makes the Gaussian family exactly detailed balanced.
enum class WeightRule { metropolis, glauber, metropolis_kms, glauber_kms };

std::string to_string(WeightRule rule);
WeightRule weight_rule_from_string(const std::string& name);
double transition_weight(WeightRule rule, double beta, double sigma_omega, double w);
double kms_frequency_shift(WeightRule rule, double beta, double sigma_omega);

// Uniform grid of `points` frequencies covering [-2 E_max, 2 E_max], centred
// on the detailed-balance shift of the rule.
RealVector gibbs_frequency_grid(double e_max, double beta, double sigma_omega, WeightRule rule,
                                int points);

// One jump per grid frequency, <i|K(w)|j> = fhat(v_ij - w) A_ij, weights
// gamma(w) times the trapezoid width. G is zero.
LindbladSpec gibbs_jump_family(const HamiltonianSpec& H, const ComplexMatrix& A, double beta,
                               const FilterSpec& filter, const RealVector& omega_grid,
                               WeightRule rule = WeightRule::metropolis);

ComplexMatrix gibbs_jump_single(const HamiltonianSpec& H, const ComplexMatrix& A, double beta,
                                const FilterSpec& filter);

struct CoherentSolution {
  ComplexMatrix G;
  double residual = 0.0;
};

// Solves -i[G, sigma] + D(sigma) = 0 for G in the eigenbasis of H.
CoherentSolution solve_coherent_term(const HamiltonianSpec& H, const std::vector<Jump>& jumps,
                                     const DensityMatrix& sigma);
CoherentSolution solve_coherent_term(const EigenDecomposition& eig, const std::vector<Jump>& jumps,
                                     const DensityMatrix& sigma);

// exp(-beta H) / Z through the eigendecomposition.
DensityMatrix gibbs_state(const HamiltonianSpec& H, double beta);

// Squared-Hamiltonian construction: the eigenstate nearest mu becomes the
// ground state of (H - mu)^2.
struct ExcitedSquared {
  ComplexMatrix K;
  ComplexVector target;
  double target_energy = 0.0;
  double squared_gap = 0.0;
};

// Eigendecomposition of (H - mu)^2 built from that of H, ascending.
EigenDecomposition squared_spectrum(const EigenDecomposition& eig, double mu);

ExcitedSquared excited_jump_squared(const HamiltonianSpec& H, double mu, const ComplexMatrix& A,
                                    const FilterSpec& filter);

struct ExcitedProjected {
  ComplexMatrix K;
  ComplexMatrix projector;
  ComplexVector target;
  double target_energy = 0.0;
};

ExcitedProjected excited_jump_projected(const HamiltonianSpec& H, double mu, double delta,
                                        const ComplexMatrix& A, const FilterSpec& ground,
                                        const FilterSpec& projector);

struct SingularJump {
  ComplexMatrix K;
  ComplexMatrix gram;  // T^dagger T
  ComplexVector target;
  JumpBuildReport report;
};

SingularJump singular_jump(const ComplexMatrix& T, const ComplexMatrix& A, const FilterSpec& filter,
                           BuildMethod method = BuildMethod::eigenbasis);

struct NonnormalSearch {
  Complex best_lambda;
  std::size_t best_index = 0;
  bool ambiguous = false;
  ComplexVector eigvec;
  double residual = 0.0;  // ||A v - lambda v||
  std::vector<double> smin_curve;
  double prepared_fidelity = 0.0;  // against the SVD ground singular vector
};

// Scans s_min(A - lambda I) over the grid and prepares the ground singular
// vector at the minimizer with a ground filter of delta = 0.9 times the gap
// of Xi^dagger Xi.
NonnormalSearch nonnormal_eigvec_search(const ComplexMatrix& A_mat,
                                        const std::vector<Complex>& lambda_grid,
                                        const std::vector<ComplexMatrix>& couplings);

// Convenience: one ground jump per coupling operator.
std::vector<Jump> ground_jumps(const HamiltonianSpec& H, const std::vector<ComplexMatrix>& couplings,
                               const FilterSpec& filter);

// Single-site X on each site.
std::vector<ComplexMatrix> default_couplings(const LatticeGeometry& geometry);

}  // namespace dissiprep
