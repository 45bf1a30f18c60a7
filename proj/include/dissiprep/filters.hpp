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

// Frequency/time filter pairs. Fourier convention:
//   f(s) = (1/2pi) int fhat(w) exp(-i w s) dw,  fhat(w) = int f(s) exp(i w s) ds.

#include <functional>
#include <string>

#include "dissiprep/densemath.hpp"

namespace dissiprep {

enum class FilterKind { ground, gibbs_gaussian, thermal_single_jump, projector };

std::string to_string(FilterKind kind);

struct FilterParams {
  double delta = 0.0;
  double e_max = 0.0;
  double beta = 0.0;
  double sigma_omega = 0.0;
  double mu = 0.0;
};

struct Truncation {
  double S = 0.0;  // half-width of the time support
  int M = 0;       // default node count
};

struct FilterSpec {
  FilterKind kind = FilterKind::ground;
  std::function<Complex(double)> freq_profile;
  std::function<Complex(double)> time_profile;
  FilterParams params;
  Truncation truncation;

  Complex fhat(double w) const { return freq_profile(w); }
  Complex f(double s) const { return time_profile(s); }
  // Frequency half-range the quadrature must resolve.
  double bandwidth() const;
};

struct QuadratureGrid {
  RealVector nodes;
  RealVector weights;
  double spacing = 0.0;
};

// Band-pass equal to 1 on [-2 E_max - delta, -delta] with erfc edges of
// half-width delta/8, clamped to exactly 0 for w >= 0. The time profile is a
// numerical inverse transform.
FilterSpec ground_filter(double delta, double e_max);

// f(t) = N exp(-t^2 sigma^2 / 2) with int |f|^2 = 1. e_max, when positive,
// sets the frequency range used by the quadrature resolution check.
FilterSpec gibbs_gaussian_filter(double beta, double sigma_omega, double e_max = 0.0);

// fhat(v) = exp(-beta v / 4) exp(-v^2 / (4 sigma^2)), so fhat(0) = 1.
FilterSpec thermal_single_jump_filter(double beta, double sigma_omega, double e_max = 0.0);
inline double default_thermal_sigma(double beta) { return std::sqrt(2.0 / beta); }

// Smooth step rising from 0 at mu to 1 at mu + delta. Applied to
// eigenvalues, not Bohr frequencies.
FilterSpec projector_filter(double mu, double delta, double e_max);

// Uniform nodes on [-S, S] with trapezoidal weights.
QuadratureGrid build_quadrature(const FilterSpec& spec, int M);
QuadratureGrid build_quadrature(const FilterSpec& spec);

// Smallest power of two whose node spacing is half the resolution limit.
int default_node_count(double S, double bandwidth);

// Trapezoid forward transform of the time profile over a grid.
Complex forward_transform(const FilterSpec& spec, const QuadratureGrid& grid, double w);

}  // namespace dissiprep
