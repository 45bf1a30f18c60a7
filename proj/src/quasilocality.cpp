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

#include "dissiprep/quasilocality.hpp"

#include <cmath>

#include "dissiprep/engine.hpp"

namespace dissiprep {

ComplexMatrix project_to_ball(const ComplexMatrix& O, const LatticeGeometry& geometry, int j, int r) {
  if (r < 0) throw ParameterError("project_to_ball: r must be nonnegative");
  const Index D = geometry.hilbert_dim();
  if (O.rows() != D || O.cols() != D) throw DimensionError("project_to_ball: operator dimension mismatch");
  const std::vector<int> ball = geometry.ball(j, r);
  const int n = geometry.n_sites;
  if (static_cast<int>(ball.size()) == n) return O;

  const std::vector<int> dims = geometry.dims();
  const ComplexMatrix reduced = partial_trace(O, dims, ball);
  Index d_out = 1;
  std::vector<bool> inside(n, false);
  for (int k : ball) inside[k] = true;
  for (int k = 0; k < n; ++k) {
    if (!inside[k]) d_out *= dims[k];
  }

  // Re-embed: an entry of the full operator is the reduced entry on the
  // ball digits when the outside digits of row and column agree.
  std::vector<Index> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];
  std::vector<Index> ball_index(D), out_index(D);
  for (Index idx = 0; idx < D; ++idx) {
    Index b = 0, o = 0;
    for (int s = 0; s < n; ++s) {
      const Index digit = (idx / stride[s]) % dims[s];
      if (inside[s]) {
        b = b * dims[s] + digit;
      } else {
        o = o * dims[s] + digit;
      }
    }
    ball_index[idx] = b;
    out_index[idx] = o;
  }
  ComplexMatrix out = ComplexMatrix::Zero(D, D);
  const double scale = 1.0 / static_cast<double>(d_out);
  for (Index c = 0; c < D; ++c) {
    for (Index row = 0; row < D; ++row) {
      if (out_index[row] == out_index[c]) out(row, c) = scale * reduced(ball_index[row], ball_index[c]);
    }
  }
  return out;
}

ShellDecomposition shell_decompose(const ComplexMatrix& O, const LatticeGeometry& geometry, int j) {
  ShellDecomposition dec;
  dec.site = j;
  const int r_max = geometry.radius_from(j);
  ComplexMatrix prev = ComplexMatrix::Zero(O.rows(), O.cols());
  ComplexMatrix total = prev;
  for (int r = 0; r <= r_max; ++r) {
    ComplexMatrix p = project_to_ball(O, geometry, j, r);
    Shell shell;
    shell.r = r;
    shell.op = p - prev;
    shell.norm = operator_norm(shell.op);
    total += shell.op;
    dec.shells.push_back(std::move(shell));
    prev = std::move(p);
  }
  dec.reconstruction_error = operator_norm(O - total);
  return dec;
}

DecayFit decay_fit(const std::vector<int>& radii, const std::vector<double>& norms) {
  if (radii.size() != norms.size()) throw FitError("decay_fit: radii and norms differ in length");
  std::vector<double> x, y;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (norms[k] > kShellNoiseFloor) {
      x.push_back(radii[k]);
      y.push_back(std::log(norms[k]));
    }
  }
  if (x.size() < 3) {
    throw FitError("decay_fit: " + std::to_string(x.size()) +
                   " shells above the noise floor, at least 3 are required");
  }
  const LineFit line = fit_line(x, y);
  DecayFit fit;
  fit.mu_decay = -line.slope;
  fit.C = std::exp(line.intercept);
  fit.r_min = static_cast<int>(x.front());
  fit.r_max = static_cast<int>(x.back());
  fit.shells_used = static_cast<int>(x.size());
  double ss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (line.intercept + line.slope * x[k]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(x.size()));
  return fit;
}

DecayFit decay_fit(const ShellDecomposition& dec) {
  std::vector<int> radii;
  std::vector<double> norms;
  for (const auto& s : dec.shells) {
    radii.push_back(s.r);
    norms.push_back(s.norm);
  }
  return decay_fit(radii, norms);
}

}  // namespace dissiprep
