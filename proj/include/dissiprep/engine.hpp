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

// Superoperator assembly, propagation and diagnostics.

#include <cstdint>
#include <string>
#include <vector>

#include "dissiprep/lindblad.hpp"

namespace dissiprep {

// Largest system dimension for which the d^2 x d^2 generator is built.
inline constexpr Index kSuperOperatorGuard = 64;
// Largest system dimension for which the generator spectrum is computed.
inline constexpr Index kSpectralGuard = 32;

struct SuperOperator {
  Index dim = 0;
  ComplexMatrix mat;  // column-stacking vectorization
};

SuperOperator assemble(const LindbladSpec& spec);

// Matrix-free L(rho).
ComplexMatrix apply(const LindbladSpec& spec, const ComplexMatrix& rho);
ComplexMatrix apply(const LindbladSpec& spec, const DensityMatrix& rho);

enum class EvolutionMethod { expm, rk4, dilation };

std::string to_string(EvolutionMethod method);

struct StepDiagnostics {
  double trace_drift = 0.0;        // |Tr rho - 1| before renormalization
  double positivity_floor = 0.0;   // smallest eigenvalue
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  EvolutionMethod method = EvolutionMethod::expm;
  std::vector<StepDiagnostics> diagnostics;
  bool step_size_warning = false;
};

// Hermitizes, checks the positivity floor (InvariantViolation below
// tol::kPsdFloor) and renormalizes.
DensityMatrix checked_state(const ComplexMatrix& m, StepDiagnostics* diag = nullptr);

EvolutionResult evolve_expm(const LindbladSpec& spec, const DensityMatrix& rho0,
                            const std::vector<double>& t_grid);

// Classical RK4 on apply(). States are recorded every record_every steps
// and at t_max.
EvolutionResult evolve_rk4(const LindbladSpec& spec, const DensityMatrix& rho0, double t_max,
                           double dt, int record_every = 1);

// First-order dilation channel: one ancilla-qubit unitary per jump followed
// by exact coherent conjugation.
class DilationChannel {
 public:
  DilationChannel(const LindbladSpec& spec, double dt);

  DensityMatrix operator()(const DensityMatrix& rho) const;
  ComplexMatrix apply_raw(const ComplexMatrix& rho) const;
  // Choi matrix sum_ij |i><j| (x) Phi(|i><j|).
  ComplexMatrix choi() const;
  double dt() const { return dt_; }

 private:
  struct Kraus {
    ComplexMatrix stay;   // <0|U|0>
    ComplexMatrix flip;   // <1|U|0>
  };
  double dt_;
  std::vector<Kraus> kraus_;
  ComplexMatrix coherent_;
};

DensityMatrix dilation_step(const LindbladSpec& spec, const DensityMatrix& rho, double dt);
EvolutionResult evolve_dilation(const LindbladSpec& spec, const DensityMatrix& rho0, double t_total,
                                double dt);

struct StationaryResult {
  DensityMatrix state;
  double gap = 0.0;
  bool unique = false;
  bool spectrum_computed = false;
  double residual = 0.0;  // ||L(sigma)||_1
  ComplexVector spectrum;
};

StationaryResult stationary_state(const SuperOperator& superop);
StationaryResult stationary_state(const LindbladSpec& spec);

struct MixingOptions {
  int random_probes = 8;
  std::uint64_t seed = 1;
  double coarse_step = 0.25;
  double t_max = 1000.0;
  double relative_tolerance = 1e-3;
  std::vector<std::pair<std::string, DensityMatrix>> extra_probes;
};

struct ProbeHit {
  std::string label;
  double hitting_time = 0.0;
};

struct MixingReport {
  double eta = 0.0;
  std::vector<ProbeHit> probes;
  double tau_mix = 0.0;
  std::string probe_description;
  double spectral_gap = 0.0;  // NaN when the spectrum was not computed
  bool lower_bound = true;
  std::vector<std::string> warnings;
};

MixingReport mixing_time(const LindbladSpec& spec, const DensityMatrix& sigma, double eta,
                         const MixingOptions& options = {});

// Largest entry of L Gamma - Gamma L^dagger with Gamma(X) = sigma^1/2 X sigma^1/2,
// that is the violation of self-adjointness of the Heisenberg generator in the
// inner product Tr[A^dagger sigma^1/2 B sigma^1/2], over matrix units in the
// eigenbasis of sigma. The sigma-commuting part of G is removed first.
double kms_residual(const LindbladSpec& spec, const DensityMatrix& sigma);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct ErrorOrder {
  std::vector<double> dts;
  std::vector<double> single_step_errors;
  std::vector<double> accumulated_errors;
  LineFit single;       // log error vs log dt
  LineFit accumulated;
  double total_time = 0.0;
};

ErrorOrder channel_error_order(const LindbladSpec& spec, const DensityMatrix& rho0,
                               const std::vector<double>& dts, double total_time = 2.0);

}  // namespace dissiprep
