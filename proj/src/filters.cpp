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

#include "dissiprep/filters.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

namespace dissiprep {

namespace {

constexpr double kPi = std::numbers::pi;
// Relative size of |f| at which the time support is cut.
constexpr double kTruncation = 1e-8;
constexpr double kTailMass = 1e-9;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterError(std::string(name) + " must be positive and finite");
  }
}

// Inverse transform by the trapezoid rule on a fixed frequency grid. The
// grid samples are computed once and shared by every copy of the callable.
struct InverseTransform {
  std::shared_ptr<const std::vector<double>> omega;
  std::shared_ptr<const std::vector<Complex>> values;
  double step = 0.0;

  Complex operator()(double s) const {
    Complex acc = 0.0;
    const auto& w = *omega;
    const auto& v = *values;
    const std::size_t n = w.size();
    for (std::size_t k = 0; k < n; ++k) {
      const double weight = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
      acc += weight * v[k] * std::polar(1.0, -w[k] * s);
    }
    return acc * step / (2.0 * kPi);
  }
};

InverseTransform make_inverse(const std::function<Complex(double)>& fhat, double lo, double hi,
                              double max_step) {
  const auto intervals = static_cast<std::size_t>(std::ceil((hi - lo) / max_step));
  const double step = (hi - lo) / static_cast<double>(intervals);
  auto omega = std::make_shared<std::vector<double>>(intervals + 1);
  auto values = std::make_shared<std::vector<Complex>>(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    (*omega)[k] = lo + step * static_cast<double>(k);
    (*values)[k] = fhat((*omega)[k]);
  }
  return {omega, values, step};
}

double smoothstep_psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = smoothstep_psi(x);
  return a / (a + smoothstep_psi(1.0 - x));
}

}  // namespace

std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::ground: return "ground";
    case FilterKind::gibbs_gaussian: return "gibbs_gaussian";
    case FilterKind::thermal_single_jump: return "thermal_single_jump";
    case FilterKind::projector: return "projector";
  }
  return "unknown";
}

double FilterSpec::bandwidth() const {
  if (params.e_max > 0.0) return params.e_max + std::abs(params.mu);
  // Without a spectral bound fall back to the Gaussian frequency envelope.
  const double shift = kind == FilterKind::thermal_single_jump
                           ? 0.5 * params.beta * params.sigma_omega * params.sigma_omega
                           : 0.0;
  return 8.0 * params.sigma_omega + shift;
}

FilterSpec ground_filter(double delta, double e_max) {
  require_positive(delta, "delta");
  require_positive(e_max, "E_max");
  if (delta > 2.0 * e_max) throw ParameterError("ground_filter: delta must not exceed 2 E_max");

  const double width = delta / 8.0;
  const double c_right = -delta / 2.0;
  const double c_left = -2.0 * e_max - 1.5 * delta;
  auto fhat = [=](double w) -> Complex {
    if (w >= 0.0) return 0.0;
    return 0.5 * (std::erfc((w - c_right) / width) - std::erfc((w - c_left) / width));
  };

  // |f(s)| is bounded by exp(-s^2 width^2 / 4) / (pi s) while max |f| is the
  // pass-band length over 2 pi. S also keeps the discarded mass of that
  // envelope below kTailMass, which bounds the truncation error of a jump.
  const double peak = (c_right - c_left) / (2.0 * kPi);
  auto envelope = [&](double s) { return std::exp(-s * s * width * width / 4.0) / (kPi * s); };
  double S = 1.0 / width;
  while (envelope(S) >= kTruncation * peak || 4.0 * envelope(S) / (S * width * width) >= kTailMass) S *= 1.01;

  FilterSpec spec;
  spec.kind = FilterKind::ground;
  spec.freq_profile = fhat;
  spec.time_profile = make_inverse(fhat, c_left - 6.0 * width, 0.0, 2.0 * kPi / (8.0 * S));
  spec.params.delta = delta;
  spec.params.e_max = e_max;
  spec.params.sigma_omega = width;
  spec.truncation.S = S;
  spec.truncation.M = default_node_count(S, spec.bandwidth());
  return spec;
}

FilterSpec gibbs_gaussian_filter(double beta, double sigma_omega, double e_max) {
  require_positive(beta, "beta");
  require_positive(sigma_omega, "sigma_omega");
  if (e_max < 0.0) throw ParameterError("E_max must be nonnegative");
  const double norm = std::pow(sigma_omega * sigma_omega / kPi, 0.25);
  const double s2 = sigma_omega * sigma_omega;

  FilterSpec spec;
  spec.kind = FilterKind::gibbs_gaussian;
  spec.time_profile = [=](double t) -> Complex { return norm * std::exp(-t * t * s2 / 2.0); };
  spec.freq_profile = [=](double w) -> Complex {
    return norm * std::sqrt(2.0 * kPi) / sigma_omega * std::exp(-w * w / (2.0 * s2));
  };
  spec.params.beta = beta;
  spec.params.sigma_omega = sigma_omega;
  spec.params.e_max = e_max;
  spec.truncation.S = std::sqrt(-2.0 * std::log(kTruncation)) / sigma_omega;
  spec.truncation.M = default_node_count(spec.truncation.S, spec.bandwidth());
  return spec;
}

FilterSpec thermal_single_jump_filter(double beta, double sigma_omega, double e_max) {
  require_positive(beta, "beta");
  require_positive(sigma_omega, "sigma_omega");
  if (e_max < 0.0) throw ParameterError("E_max must be nonnegative");
  const double s2 = sigma_omega * sigma_omega;
  const double amplitude =
      std::exp(beta * beta * s2 / 16.0) * std::sqrt(4.0 * kPi * s2) / (2.0 * kPi);

  FilterSpec spec;
  spec.kind = FilterKind::thermal_single_jump;
  spec.freq_profile = [=](double v) -> Complex {
    return std::exp(-beta * v / 4.0 - v * v / (4.0 * s2));
  };
  spec.time_profile = [=](double s) -> Complex {
    return amplitude * std::exp(-s2 * s * s) * std::polar(1.0, s * beta * s2 / 2.0);
  };
  spec.params.beta = beta;
  spec.params.sigma_omega = sigma_omega;
  spec.params.e_max = e_max;
  spec.truncation.S = std::sqrt(-std::log(kTruncation)) / sigma_omega;
  spec.truncation.M = default_node_count(spec.truncation.S, spec.bandwidth());
  return spec;
}

FilterSpec projector_filter(double mu, double delta, double e_max) {
  require_positive(delta, "delta");
  require_positive(e_max, "E_max");
  auto fhat = [=](double w) -> Complex { return smoothstep((w - mu) / delta); };

  // The time profile represents fhat on [-E_max, E_max]: the step is rolled
  // off above E_max by a mirrored step so the transform stays integrable.
  const double top = std::max(e_max, mu + delta);
  auto windowed = [=](double w) -> Complex {
    return smoothstep((w - mu) / delta) * (1.0 - smoothstep((w - top) / delta));
  };
  const double S = 256.0 / delta;

  FilterSpec spec;
  spec.kind = FilterKind::projector;
  spec.freq_profile = fhat;
  spec.time_profile = make_inverse(windowed, mu, top + delta, 2.0 * kPi / (8.0 * S));
  spec.params.mu = mu;
  spec.params.delta = delta;
  spec.params.e_max = e_max;
  spec.truncation.S = S;
  spec.truncation.M = default_node_count(S, spec.bandwidth());
  return spec;
}

int default_node_count(double S, double bandwidth) {
  const double limit = kPi / (2.0 * bandwidth);
  int M = 8;
  while (2.0 * S / (M - 1) > 0.5 * limit) M *= 2;
  return M;
}

QuadratureGrid build_quadrature(const FilterSpec& spec, int M) {
  if (M < 8 || M % 2 != 0) throw ParameterError("build_quadrature: M must be even and >= 8");
  const double S = spec.truncation.S;
  require_positive(S, "truncation S");
  const double h = 2.0 * S / (M - 1);
  const double limit = kPi / (2.0 * spec.bandwidth());
  if (h > limit) {
    throw ResolutionError("build_quadrature: node spacing " + std::to_string(h) +
                          " exceeds the resolution limit " + std::to_string(limit) +
                          "; increase M");
  }
  QuadratureGrid grid;
  grid.spacing = h;
  grid.nodes.resize(M);
  grid.weights.setConstant(M, h);
  for (int k = 0; k < M; ++k) grid.nodes(k) = -S + h * k;
  // Symmetrize against rounding.
  for (int k = 0; k < M / 2; ++k) {
    const double s = 0.5 * (grid.nodes(M - 1 - k) - grid.nodes(k));
    grid.nodes(k) = -s;
    grid.nodes(M - 1 - k) = s;
  }
  grid.weights(0) = grid.weights(M - 1) = h / 2.0;
  return grid;
}

QuadratureGrid build_quadrature(const FilterSpec& spec) {
  return build_quadrature(spec, spec.truncation.M);
}

Complex forward_transform(const FilterSpec& spec, const QuadratureGrid& grid, double w) {
  Complex acc = 0.0;
  for (Index k = 0; k < grid.nodes.size(); ++k) {
    acc += grid.weights(k) * spec.f(grid.nodes(k)) * std::polar(1.0, w * grid.nodes(k));
  }
  return acc;
}

}  // namespace dissiprep
