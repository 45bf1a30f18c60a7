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

#include "dissiprep/lindblad.hpp"

#include <cmath>
#include <string>

namespace dissiprep {

LindbladSpec LindbladSpec::make(ComplexMatrix G, std::vector<Jump> jumps) {
  LindbladSpec spec{std::move(G), std::move(jumps)};
  spec.validate();
  return spec;
}

LindbladSpec LindbladSpec::from_jumps(Index dim, std::vector<ComplexMatrix> jumps) {
  std::vector<Jump> out;
  out.reserve(jumps.size());
  for (auto& k : jumps) out.push_back({std::move(k), 1.0});
  return make(ComplexMatrix::Zero(dim, dim), std::move(out));
}

void LindbladSpec::validate() const {
  if (G.rows() != G.cols() || G.rows() == 0) throw DimensionError("LindbladSpec: G must be square");
  if (!G.allFinite()) throw DomainError("LindbladSpec: G has non-finite entries");
  if (hermiticity_defect(G) > tol::kHermitianInput * std::max(1.0, max_abs(G))) {
    throw DomainError("LindbladSpec: G is not Hermitian");
  }
  for (std::size_t j = 0; j < jumps.size(); ++j) {
    const auto& jump = jumps[j];
    if (jump.K.rows() != G.rows() || jump.K.cols() != G.cols()) {
      throw DimensionError("LindbladSpec: jump " + std::to_string(j) + " has the wrong shape");
    }
    if (!(jump.weight >= 0.0) || !std::isfinite(jump.weight)) {
      throw ParameterError("LindbladSpec: jump weights must be finite and nonnegative");
    }
    if (!jump.K.allFinite()) throw DomainError("LindbladSpec: jump has non-finite entries");
  }
}

double LindbladSpec::norm_estimate() const {
  double n = operator_norm(G);
  for (const auto& jump : jumps) {
    const double k = operator_norm(jump.K);
    n += jump.weight * k * k;
  }
  return n;
}

}  // namespace dissiprep
