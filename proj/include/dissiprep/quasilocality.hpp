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

// Shell decomposition of operators around a lattice site.

#include <vector>

#include "dissiprep/models.hpp"

namespace dissiprep {

struct Shell {
  int r = 0;
  ComplexMatrix op;
  double norm = 0.0;  // operator 2-norm
};

struct ShellDecomposition {
  int site = 0;
  std::vector<Shell> shells;
  double reconstruction_error = 0.0;
};

struct DecayFit {
  double C = 0.0;
  double mu_decay = 0.0;
  int r_min = 0;
  int r_max = 0;
  double residual = 0.0;  // root mean square of the log-norm residuals
  int shells_used = 0;
};

// Norm below which a shell is treated as zero by decay_fit.
inline constexpr double kShellNoiseFloor = 1e-13;

// Tr_out(O) / d_out tensored with the identity outside B_j(r).
ComplexMatrix project_to_ball(const ComplexMatrix& O, const LatticeGeometry& geometry, int j, int r);

// O_0 = P_0(O), O_r = P_r(O) - P_{r-1}(O) up to the largest distance from j.
ShellDecomposition shell_decompose(const ComplexMatrix& O, const LatticeGeometry& geometry, int j);

// Least-squares line through (r, log ||O_r||) over shells above the floor.
DecayFit decay_fit(const ShellDecomposition& dec);
DecayFit decay_fit(const std::vector<int>& radii, const std::vector<double>& norms);

}  // namespace dissiprep
