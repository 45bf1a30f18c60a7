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

// Coherent term plus weighted jump operators:
//   L(rho) = -i[G, rho] + sum_j w_j (K_j rho K_j^dagger - 1/2 {K_j^dagger K_j, rho}).

#include <vector>

#include "dissiprep/densemath.hpp"

namespace dissiprep {

struct Jump {
  ComplexMatrix K;
  double weight = 1.0;
};

struct LindbladSpec {
  ComplexMatrix G;
  std::vector<Jump> jumps;

  // Checks shapes, Hermiticity of G and nonnegative weights.
  static LindbladSpec make(ComplexMatrix G, std::vector<Jump> jumps);
  static LindbladSpec from_jumps(Index dim, std::vector<ComplexMatrix> jumps);

  Index dim() const { return G.rows(); }
  void validate() const;
  // ||G|| + sum_j w_j ||K_j||^2, a bound on the generator norm.
  double norm_estimate() const;
};

}  // namespace dissiprep
