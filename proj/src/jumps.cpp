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

#include "dissiprep/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dissiprep/engine.hpp"

namespace dissiprep {

namespace {

void require_same_dim(const ComplexMatrix& a, Index d, const char* what) {
  if (a.rows() != d || a.cols() != d) {
    throw DimensionError(std::string(what) + ": expected a " + std::to_string(d) + "x" +
                         std::to_string(d) + " matrix");
  }
}

double spectral_scale(const EigenDecomposition& eig) {
  const Index d = eig.eigenvalues.size();
  return std::max({1.0, std::abs(eig.eigenvalues(0)), std::abs(eig.eigenvalues(d - 1))});
}

}  // namespace

std::string to_string(BuildMethod method) {
  return method == BuildMethod::eigenbasis ? "eigenbasis" : "quadrature";
}

ComplexMatrix filtered_jump(const EigenDecomposition& eig, const ComplexMatrix& A,
                            const std::function<Complex(double)>& fhat) {
  const Index d = eig.eigenvalues.size();
  require_same_dim(A, d, "filtered_jump");
  const ComplexMatrix& V = eig.eigenvectors;
  ComplexMatrix k = V.adjoint() * A * V;
  const double snap = kDegeneracyTolerance * spectral_scale(eig);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      const double nu = eig.eigenvalues(i) - eig.eigenvalues(j);
      k(i, j) *= fhat(std::abs(nu) <= snap ? 0.0 : nu);
    }
  }
  return V * k * V.adjoint();
}

void check_ground_gap(const EigenDecomposition& eig, double delta) {
  if (eig.eigenvalues.size() < 2) throw DomainError("ground state problem needs dimension >= 2");
  const double gap = exact_gap(eig);
  if (gap <= kDegeneracyTolerance * spectral_scale(eig)) {
    throw DomainError("ground state is degenerate (gap " + std::to_string(gap) + ")");
  }
  if (gap < delta * (1.0 - 1e-12)) {
    throw ParameterError("spectral gap " + std::to_string(gap) + " is below the filter delta " +
                         std::to_string(delta));
  }
}

JumpResult ground_jump_eigenbasis(const ComplexMatrix& H, const EigenDecomposition& eig,
                                  const ComplexMatrix& A, const FilterSpec& filter) {
  require_same_dim(A, H.rows(), "ground_jump_eigenbasis");
  check_ground_gap(eig, filter.params.delta);
  JumpResult out;
  out.K = filtered_jump(eig, A, filter.freq_profile);
  out.report.method = BuildMethod::eigenbasis;
  out.report.annihilation_residual = (out.K * eig.eigenvectors.col(0)).norm();
  out.report.S = filter.truncation.S;
  out.report.M = filter.truncation.M;
  return out;
}

JumpResult ground_jump_eigenbasis(const HamiltonianSpec& H, const ComplexMatrix& A,
                                  const FilterSpec& filter) {
  return ground_jump_eigenbasis(H.dense, eig_hermitian(H.dense), A, filter);
}

ComplexMatrix quadrature_jump(const ComplexMatrix& H, const ComplexMatrix& A,
                              const FilterSpec& filter, const QuadratureGrid& grid) {
  require_same_dim(A, H.rows(), "quadrature_jump");
  const Index M = grid.nodes.size();
  if (M < 2) throw ParameterError("quadrature_jump: grid needs at least two nodes");
  const double h = grid.spacing;
  const double bandwidth = std::max(filter.bandwidth(), operator_norm(H));
  if (h > M_PI / (2.0 * bandwidth)) {
    throw ResolutionError("quadrature_jump: node spacing " + std::to_string(h) +
                          " does not resolve the spectrum of H");
  }
  const Index d = H.rows();
  ComplexMatrix U = expm(kI * grid.nodes(0) * H);
  const ComplexMatrix step = expm(kI * h * H);
  ComplexMatrix K = ComplexMatrix::Zero(d, d);
  ComplexMatrix ua(d, d), next(d, d);
  for (Index k = 0; k < M; ++k) {
    ua.noalias() = U * A;
    K.noalias() += (grid.weights(k) * filter.f(grid.nodes(k))) * (ua * U.adjoint());
    next.noalias() = step * U;
    U.swap(next);
  }
  return K;
}

JumpResult ground_jump_quadrature(const ComplexMatrix& H, const EigenDecomposition& eig,
                                  const ComplexMatrix& A, const FilterSpec& filter,
                                  const QuadratureGrid& grid) {
  check_ground_gap(eig, filter.params.delta);
  JumpResult out;
  out.K = quadrature_jump(H, A, filter, grid);
  out.report.method = BuildMethod::quadrature;
  out.report.annihilation_residual = (out.K * eig.eigenvectors.col(0)).norm();
  out.report.S = filter.truncation.S;
  out.report.M = static_cast<int>(grid.nodes.size());
  const ComplexMatrix exact = filtered_jump(eig, A, filter.freq_profile);
  out.report.mismatch_vs_eigenbasis = operator_norm(out.K - exact);
  return out;
}

JumpResult ground_jump_quadrature(const HamiltonianSpec& H, const ComplexMatrix& A,
                                  const FilterSpec& filter, const QuadratureGrid& grid) {
  return ground_jump_quadrature(H.dense, eig_hermitian(H.dense), A, filter, grid);
}

// ---------------------------------------------------------------------------
// Gibbs families

std::string to_string(WeightRule rule) {
  switch (rule) {
    case WeightRule::metropolis: return "metropolis";
    case WeightRule::glauber: return "glauber";
    case WeightRule::metropolis_kms: return "metropolis_kms";
    case WeightRule::glauber_kms: return "glauber_kms";
  }
  return "unknown";
}

WeightRule weight_rule_from_string(const std::string& name) {
  for (WeightRule r : {WeightRule::metropolis, WeightRule::glauber, WeightRule::metropolis_kms,
                       WeightRule::glauber_kms}) {
    if (to_string(r) == name) return r;
  }
  throw ParameterError("unknown weight rule '" + name + "'");
}

double kms_frequency_shift(WeightRule rule, double beta, double sigma_omega) {
  if (rule == WeightRule::metropolis_kms || rule == WeightRule::glauber_kms) {
    return beta * sigma_omega * sigma_omega / 4.0;
  }
  return 0.0;
}

double transition_weight(WeightRule rule, double beta, double sigma_omega, double w) {
  const double x = w + kms_frequency_shift(rule, beta, sigma_omega);
  switch (rule) {
    case WeightRule::metropolis:
    case WeightRule::metropolis_kms:
      return std::min(1.0, std::exp(-beta * x));
    case WeightRule::glauber:
    case WeightRule::glauber_kms:
      return 1.0 / (1.0 + std::exp(beta * x));
  }
  return 0.0;
}

RealVector gibbs_frequency_grid(double e_max, double beta, double sigma_omega, WeightRule rule,
                                int points) {
  if (points < 3) throw ParameterError("gibbs_frequency_grid: need at least 3 points");
  const double shift = kms_frequency_shift(rule, beta, sigma_omega);
  const double half = 2.0 * e_max + shift + 6.0 * sigma_omega;
  return RealVector::LinSpaced(points, -shift - half, -shift + half);
}

LindbladSpec gibbs_jump_family(const HamiltonianSpec& H, const ComplexMatrix& A, double beta,
                               const FilterSpec& filter, const RealVector& omega_grid,
                               WeightRule rule) {
  if (!(beta >= 0.0)) throw ParameterError("gibbs_jump_family: beta must be nonnegative");
  if (filter.kind != FilterKind::gibbs_gaussian) {
    throw ParameterError("gibbs_jump_family: expects a gibbs_gaussian filter");
  }
  const Index n = omega_grid.size();
  if (n < 2) throw ParameterError("gibbs_jump_family: frequency grid needs at least two points");
  for (Index l = 1; l < n; ++l) {
    if (!(omega_grid(l) > omega_grid(l - 1))) {
      throw ParameterError("gibbs_jump_family: frequency grid must be strictly increasing");
    }
  }
  const double e = H.norm_bound();
  const double slack = 1e-12 * std::max(1.0, e);
  if (omega_grid(0) > -2.0 * e + slack || omega_grid(n - 1) < 2.0 * e - slack) {
    throw ParameterError("gibbs_jump_family: frequency grid does not cover [-2 E_max, 2 E_max]");
  }
  const EigenDecomposition eig = eig_hermitian(H.dense);
  const double sigma = filter.params.sigma_omega;
  std::vector<Jump> jumps;
  jumps.reserve(n);
  for (Index l = 0; l < n; ++l) {
    const double lo = l > 0 ? omega_grid(l - 1) : omega_grid(l);
    const double hi = l + 1 < n ? omega_grid(l + 1) : omega_grid(l);
    const double width = 0.5 * (hi - lo);
    const double w = omega_grid(l);
    auto shifted = [&](double v) { return filter.fhat(v - w); };
    jumps.push_back({filtered_jump(eig, A, shifted), transition_weight(rule, beta, sigma, w) * width});
  }
  return LindbladSpec::make(ComplexMatrix::Zero(H.dim(), H.dim()), std::move(jumps));
}

ComplexMatrix gibbs_jump_single(const HamiltonianSpec& H, const ComplexMatrix& A, double beta,
                                const FilterSpec& filter) {
  if (!(beta > 0.0)) throw ParameterError("gibbs_jump_single: beta must be positive");
  if (filter.kind != FilterKind::thermal_single_jump) {
    throw ParameterError("gibbs_jump_single: expects a thermal_single_jump filter");
  }
  // The temperature is carried by the filter; beta only labels the target.
  return filtered_jump(eig_hermitian(H.dense), A, filter.freq_profile);
}

CoherentSolution solve_coherent_term(const EigenDecomposition& eig, const std::vector<Jump>& jumps,
                                     const DensityMatrix& sigma) {
  const Index d = eig.eigenvalues.size();
  require_same_dim(sigma.matrix(), d, "solve_coherent_term");
  const ComplexMatrix& V = eig.eigenvectors;
  const ComplexMatrix s = V.adjoint() * sigma.matrix() * V;
  ComplexMatrix off = s;
  off.diagonal().setZero();
  if (max_abs(off) > 1e-10) {
    throw DomainError("solve_coherent_term: sigma is not diagonal in the eigenbasis of H");
  }
  const RealVector p = s.diagonal().real();
  if (!(p.minCoeff() > 0.0)) throw DomainError("solve_coherent_term: sigma is not full rank");

  ComplexMatrix D = ComplexMatrix::Zero(d, d);
  ComplexMatrix M = ComplexMatrix::Zero(d, d);
  const ComplexMatrix P = p.cast<Complex>().asDiagonal();
  for (const auto& jump : jumps) {
    require_same_dim(jump.K, d, "solve_coherent_term");
    const ComplexMatrix k = V.adjoint() * jump.K * V;
    D.noalias() += jump.weight * (k * P * k.adjoint());
    M.noalias() += jump.weight * (k.adjoint() * k);
  }
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) D(i, j) -= 0.5 * M(i, j) * (p(i) + p(j));
  }

  const double equal_tol = 1e-10 * p.maxCoeff();
  ComplexMatrix Ge = ComplexMatrix::Zero(d, d);
  double diag_res = 0.0;
  double pair_res = 0.0;
  for (Index j = 0; j < d; ++j) {
    diag_res = std::max(diag_res, std::abs(D(j, j)));
    for (Index i = 0; i < d; ++i) {
      if (i == j) continue;
      const double dp = p(j) - p(i);
      if (std::abs(dp) <= equal_tol) {
        pair_res = std::max(pair_res, std::abs(D(i, j)));
      } else {
        Ge(i, j) = -kI * D(i, j) / dp;
      }
    }
  }
  return {hermitian_part(V * Ge * V.adjoint()), diag_res + pair_res};
}

CoherentSolution solve_coherent_term(const HamiltonianSpec& H, const std::vector<Jump>& jumps,
                                     const DensityMatrix& sigma) {
  return solve_coherent_term(eig_hermitian(H.dense), jumps, sigma);
}

DensityMatrix gibbs_state(const HamiltonianSpec& H, double beta) {
  if (!(beta >= 0.0)) throw ParameterError("gibbs_state: beta must be nonnegative");
  const EigenDecomposition eig = eig_hermitian(H.dense);
  RealVector p = (-(beta) * (eig.eigenvalues.array() - eig.eigenvalues(0))).exp().matrix();
  p /= p.sum();
  return DensityMatrix::normalized(eig.eigenvectors * p.cast<Complex>().asDiagonal() *
                                   eig.eigenvectors.adjoint());
}

// ---------------------------------------------------------------------------
// Excited states

EigenDecomposition squared_spectrum(const EigenDecomposition& eig, double mu) {
  const Index d = eig.eigenvalues.size();
  RealVector sq = (eig.eigenvalues.array() - mu).square().matrix();
  std::vector<Index> order(d);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return sq(a) < sq(b); });
  EigenDecomposition out;
  out.eigenvalues.resize(d);
  out.eigenvectors.resize(d, d);
  for (Index k = 0; k < d; ++k) {
    out.eigenvalues(k) = sq(order[k]);
    out.eigenvectors.col(k) = eig.eigenvectors.col(order[k]);
  }
  return out;
}

ExcitedSquared excited_jump_squared(const HamiltonianSpec& H, double mu, const ComplexMatrix& A,
                                    const FilterSpec& filter) {
  const EigenDecomposition eig = eig_hermitian(H.dense);
  const EigenDecomposition sq = squared_spectrum(eig, mu);
  check_ground_gap(sq, filter.params.delta);
  ExcitedSquared out;
  out.K = filtered_jump(sq, A, filter.freq_profile);
  out.target = sq.eigenvectors.col(0);
  out.target_energy = (out.target.adjoint() * H.dense * out.target)(0, 0).real();
  out.squared_gap = exact_gap(sq);
  return out;
}

ExcitedProjected excited_jump_projected(const HamiltonianSpec& H, double mu, double delta,
                                        const ComplexMatrix& A, const FilterSpec& ground,
                                        const FilterSpec& projector) {
  if (!(delta > 0.0)) throw ParameterError("excited_jump_projected: delta must be positive");
  if (projector.kind != FilterKind::projector) {
    throw ParameterError("excited_jump_projected: expects a projector filter");
  }
  const EigenDecomposition eig = eig_hermitian(H.dense);
  const Index d = eig.eigenvalues.size();
  require_same_dim(A, d, "excited_jump_projected");
  Index target = d;
  for (Index i = 0; i < d; ++i) {
    const double l = eig.eigenvalues(i);
    if (l > mu && l < mu + delta) {
      throw ParameterError("excited_jump_projected: eigenvalue " + std::to_string(l) +
                           " lies inside (mu, mu + delta)");
    }
    if (target == d && l >= mu + delta) target = i;
  }
  if (target == d) throw ParameterError("excited_jump_projected: no eigenvalue above mu + delta");
  if (target + 1 < d) {
    const double gap = eig.eigenvalues(target + 1) - eig.eigenvalues(target);
    if (gap <= kDegeneracyTolerance * spectral_scale(eig)) {
      throw DomainError("excited_jump_projected: target eigenvalue is degenerate");
    }
    if (gap < ground.params.delta * (1.0 - 1e-12)) {
      throw ParameterError("excited_jump_projected: gap above the target is below the filter delta");
    }
  }

  const ComplexMatrix& V = eig.eigenvectors;
  RealVector proj(d);
  for (Index i = 0; i < d; ++i) proj(i) = projector.fhat(eig.eigenvalues(i)).real();
  ComplexMatrix k = V.adjoint() * A * V;
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      k(i, j) *= proj(i) * ground.fhat(eig.eigenvalues(i) - eig.eigenvalues(j));
    }
  }
  ExcitedProjected out;
  out.K = V * k * V.adjoint();
  out.projector = hermitian_part(V * proj.cast<Complex>().asDiagonal() * V.adjoint());
  out.target = V.col(target);
  out.target_energy = eig.eigenvalues(target);
  return out;
}

// ---------------------------------------------------------------------------
// Singular vectors

SingularJump singular_jump(const ComplexMatrix& T, const ComplexMatrix& A, const FilterSpec& filter,
                           BuildMethod method) {
  if (T.cols() == 0) throw DimensionError("singular_jump: empty matrix");
  SingularJump out;
  out.gram = hermitian_part(T.adjoint() * T);
  const EigenDecomposition eig = eig_hermitian(out.gram);
  JumpResult r;
  if (method == BuildMethod::eigenbasis) {
    r = ground_jump_eigenbasis(out.gram, eig, A, filter);
  } else {
    r = ground_jump_quadrature(out.gram, eig, A, filter, build_quadrature(filter));
  }
  out.K = std::move(r.K);
  out.report = r.report;
  out.target = eig.eigenvectors.col(0);
  return out;
}

NonnormalSearch nonnormal_eigvec_search(const ComplexMatrix& A_mat,
                                        const std::vector<Complex>& lambda_grid,
                                        const std::vector<ComplexMatrix>& couplings) {
  if (lambda_grid.empty()) throw ParameterError("nonnormal_eigvec_search: empty lambda grid");
  if (A_mat.rows() != A_mat.cols()) throw DimensionError("nonnormal_eigvec_search: A must be square");
  if (couplings.empty()) throw ParameterError("nonnormal_eigvec_search: no coupling operators");
  const Index d = A_mat.rows();
  const ComplexMatrix ident = ComplexMatrix::Identity(d, d);

  NonnormalSearch out;
  out.smin_curve.reserve(lambda_grid.size());
  for (const Complex& lambda : lambda_grid) {
    Eigen::BDCSVD<ComplexMatrix> s(A_mat - lambda * ident);
    out.smin_curve.push_back(s.singularValues()(d - 1));
  }
  const auto best = std::min_element(out.smin_curve.begin(), out.smin_curve.end());
  out.best_index = static_cast<std::size_t>(best - out.smin_curve.begin());
  for (std::size_t k = 0; k < out.smin_curve.size(); ++k) {
    if (k != out.best_index && std::abs(out.smin_curve[k] - *best) <= 1e-12) out.ambiguous = true;
  }
  out.best_lambda = lambda_grid[out.best_index];

  const ComplexMatrix xi = A_mat - out.best_lambda * ident;
  const ComplexMatrix gram = hermitian_part(xi.adjoint() * xi);
  const EigenDecomposition eig = eig_hermitian(gram);
  const double gap = exact_gap(eig);
  if (gap <= kDegeneracyTolerance * spectral_scale(eig)) {
    throw DomainError("nonnormal_eigvec_search: smallest singular value is degenerate");
  }
  const FilterSpec filter = ground_filter(0.9 * gap, std::max(eig.eigenvalues(d - 1), 0.45 * gap));
  std::vector<Jump> jumps;
  for (const auto& a : couplings) jumps.push_back({ground_jump_eigenbasis(gram, eig, a, filter).K, 1.0});
  const LindbladSpec spec = LindbladSpec::make(ComplexMatrix::Zero(d, d), std::move(jumps));
  const StationaryResult st = stationary_state(spec);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(st.state.matrix());
  out.eigvec = es.eigenvectors().col(d - 1);
  out.residual = (A_mat * out.eigvec - out.best_lambda * out.eigvec).norm();
  out.prepared_fidelity = std::norm(eig.eigenvectors.col(0).dot(out.eigvec));
  return out;
}

std::vector<Jump> ground_jumps(const HamiltonianSpec& H, const std::vector<ComplexMatrix>& couplings,
                               const FilterSpec& filter) {
  const EigenDecomposition eig = eig_hermitian(H.dense);
  std::vector<Jump> out;
  out.reserve(couplings.size());
  for (const auto& a : couplings) out.push_back({ground_jump_eigenbasis(H.dense, eig, a, filter).K, 1.0});
  return out;
}

std::vector<ComplexMatrix> default_couplings(const LatticeGeometry& geometry) {
  std::vector<ComplexMatrix> out;
  for (int s = 0; s < geometry.n_sites; ++s) out.push_back(pauli_site_operator(geometry, s, Pauli::X));
  return out;
}

}  // namespace dissiprep
