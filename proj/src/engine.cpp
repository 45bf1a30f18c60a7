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

#include "dissiprep/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "dissiprep/models.hpp"

namespace dissiprep {

namespace {

// Eigenvalues with modulus below this are counted as the null space.
constexpr double kNullTolerance = 1e-8;
constexpr double kGapFloor = 1e-10;

void require_dim(const ComplexMatrix& m, Index d, const char* what) {
  if (m.rows() != d || m.cols() != d) {
    throw DimensionError(std::string(what) + ": state dimension does not match the generator");
  }
}

ComplexMatrix effective_hamiltonian(const LindbladSpec& spec) {
  ComplexMatrix heff = -kI * spec.G;
  for (const auto& jump : spec.jumps) heff.noalias() -= (0.5 * jump.weight) * (jump.K.adjoint() * jump.K);
  return heff;
}

// L(rho) with a precomputed effective Hamiltonian.
struct Generator {
  const LindbladSpec& spec;
  ComplexMatrix heff;

  explicit Generator(const LindbladSpec& s) : spec(s), heff(effective_hamiltonian(s)) {}

  ComplexMatrix operator()(const ComplexMatrix& rho) const {
    ComplexMatrix out = heff * rho;
    out += out.adjoint().eval();
    for (const auto& jump : spec.jumps) {
      if (jump.weight == 0.0) continue;
      out.noalias() += jump.weight * (jump.K * rho * jump.K.adjoint());
    }
    return out;
  }
};

// Valid only for Hermitian rho, where (heff rho)^dagger = rho heff^dagger.
ComplexMatrix rk4_step(const Generator& gen, const ComplexMatrix& rho, double dt) {
  const ComplexMatrix k1 = gen(rho);
  const ComplexMatrix k2 = gen(hermitian_part(rho + 0.5 * dt * k1));
  const ComplexMatrix k3 = gen(hermitian_part(rho + 0.5 * dt * k2));
  const ComplexMatrix k4 = gen(hermitian_part(rho + dt * k3));
  return hermitian_part(rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

ComplexMatrix rk4_propagate(const Generator& gen, ComplexMatrix rho, double t, double dt_max) {
  if (t <= 0.0) return rho;
  const auto steps = static_cast<long>(std::ceil(t / dt_max - 1e-12));
  const double dt = t / static_cast<double>(steps);
  for (long k = 0; k < steps; ++k) rho = rk4_step(gen, rho, dt);
  return rho;
}

double distance_to(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  return trace_norm(hermitian_part(rho - sigma));
}

}  // namespace

std::string to_string(EvolutionMethod method) {
  switch (method) {
    case EvolutionMethod::expm: return "expm";
    case EvolutionMethod::rk4: return "rk4";
    case EvolutionMethod::dilation: return "dilation";
  }
  return "unknown";
}

SuperOperator assemble(const LindbladSpec& spec) {
  spec.validate();
  const Index d = spec.dim();
  if (d > kSuperOperatorGuard) {
    throw DimensionError("assemble: system dimension " + std::to_string(d) +
                         " exceeds the superoperator guard " + std::to_string(kSuperOperatorGuard) +
                         "; use the matrix-free path");
  }
  const ComplexMatrix ident = ComplexMatrix::Identity(d, d);
  const ComplexMatrix heff = effective_hamiltonian(spec);
  SuperOperator out;
  out.dim = d;
  out.mat = kron(ident, heff) + kron(heff.conjugate(), ident);
  for (const auto& jump : spec.jumps) {
    if (jump.weight == 0.0) continue;
    out.mat += jump.weight * kron(jump.K.conjugate(), jump.K);
  }
  return out;
}

ComplexMatrix apply(const LindbladSpec& spec, const ComplexMatrix& rho) {
  spec.validate();
  require_dim(rho, spec.dim(), "apply");
  const ComplexMatrix heff = effective_hamiltonian(spec);
  ComplexMatrix out = heff * rho + rho * heff.adjoint();
  for (const auto& jump : spec.jumps) {
    out.noalias() += jump.weight * (jump.K * rho * jump.K.adjoint());
  }
  return out;
}

ComplexMatrix apply(const LindbladSpec& spec, const DensityMatrix& rho) {
  return apply(spec, rho.matrix());
}

DensityMatrix checked_state(const ComplexMatrix& m, StepDiagnostics* diag) {
  const ComplexMatrix h = hermitian_part(m);
  const double tr = h.trace().real();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  const double floor = es.eigenvalues()(0) / tr;
  if (diag) {
    diag->trace_drift = std::abs(tr - 1.0);
    diag->positivity_floor = floor;
  }
  if (!std::isfinite(tr) || !(floor >= tol::kPsdFloor)) {
    throw InvariantViolation("positivity floor violated: smallest eigenvalue " +
                             std::to_string(floor) + ", trace " + std::to_string(tr));
  }
  return DensityMatrix::normalized(h);
}

EvolutionResult evolve_expm(const LindbladSpec& spec, const DensityMatrix& rho0,
                            const std::vector<double>& t_grid) {
  const SuperOperator L = assemble(spec);
  require_dim(rho0.matrix(), L.dim, "evolve_expm");
  EvolutionResult out;
  out.method = EvolutionMethod::expm;
  ComplexVector v = vectorize(rho0.matrix());
  double t_prev = 0.0;
  double cached_dt = std::numeric_limits<double>::quiet_NaN();
  ComplexMatrix step;
  for (double t : t_grid) {
    if (!(t >= t_prev)) throw ParameterError("evolve_expm: time grid must be nonnegative and nondecreasing");
    const double dt = t - t_prev;
    if (dt > 0.0) {
      if (!(std::abs(dt - cached_dt) <= 1e-14 * std::max(1.0, dt))) {
        step = expm(L.mat * dt);
        cached_dt = dt;
      }
      v = step * v;
    }
    StepDiagnostics diag;
    out.states.push_back(checked_state(unvectorize(v), &diag));
    out.diagnostics.push_back(diag);
    out.times.push_back(t);
    v = vectorize(out.states.back().matrix());
    t_prev = t;
  }
  return out;
}

EvolutionResult evolve_rk4(const LindbladSpec& spec, const DensityMatrix& rho0, double t_max,
                           double dt, int record_every) {
  spec.validate();
  require_dim(rho0.matrix(), spec.dim(), "evolve_rk4");
  if (!(dt > 0.0)) throw ParameterError("evolve_rk4: dt must be positive");
  if (!(t_max >= 0.0)) throw ParameterError("evolve_rk4: t_max must be nonnegative");
  if (record_every < 1) throw ParameterError("evolve_rk4: record_every must be >= 1");
  EvolutionResult out;
  out.method = EvolutionMethod::rk4;
  out.step_size_warning = dt > 0.1 / std::max(spec.norm_estimate(), 1e-300);

  const Generator gen(spec);
  ComplexMatrix rho = rho0.matrix();
  auto record = [&](double t) {
    StepDiagnostics diag;
    out.states.push_back(checked_state(rho, &diag));
    out.diagnostics.push_back(diag);
    out.times.push_back(t);
  };
  record(0.0);
  const auto steps = static_cast<long>(std::ceil(t_max / dt - 1e-9));
  double t = 0.0;
  for (long k = 1; k <= steps; ++k) {
    const double h = std::min(dt, t_max - t);
    rho = rk4_step(gen, rho, h);
    t = (k == steps) ? t_max : t + h;
    if (k % record_every == 0 || k == steps) record(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dilation

DilationChannel::DilationChannel(const LindbladSpec& spec, double dt) : dt_(dt) {
  spec.validate();
  if (!(dt >= 0.0)) throw ParameterError("dilation: dt must be nonnegative");
  const Index d = spec.dim();
  const double tau = std::sqrt(dt);
  for (const auto& jump : spec.jumps) {
    if (jump.weight == 0.0) continue;
    const ComplexMatrix k = std::sqrt(jump.weight) * jump.K;
    ComplexMatrix dil = ComplexMatrix::Zero(2 * d, 2 * d);
    dil.topRightCorner(d, d) = k.adjoint();
    dil.bottomLeftCorner(d, d) = k;
    const ComplexMatrix u = expm_hermitian(dil, Complex(0.0, -tau));
    kraus_.push_back({u.topLeftCorner(d, d), u.bottomLeftCorner(d, d)});
  }
  coherent_ = expm_hermitian(spec.G, Complex(0.0, -dt));
}

ComplexMatrix DilationChannel::apply_raw(const ComplexMatrix& rho) const {
  ComplexMatrix r = rho;
  for (const auto& k : kraus_) {
    r = k.stay * r * k.stay.adjoint() + k.flip * r * k.flip.adjoint();
  }
  return coherent_ * r * coherent_.adjoint();
}

DensityMatrix DilationChannel::operator()(const DensityMatrix& rho) const {
  return checked_state(apply_raw(rho.matrix()));
}

ComplexMatrix DilationChannel::choi() const {
  const Index d = coherent_.rows();
  ComplexMatrix out = ComplexMatrix::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      ComplexMatrix e = ComplexMatrix::Zero(d, d);
      e(i, j) = 1.0;
      out.block(i * d, j * d, d, d) = apply_raw(e);
    }
  }
  return out;
}

DensityMatrix dilation_step(const LindbladSpec& spec, const DensityMatrix& rho, double dt) {
  require_dim(rho.matrix(), spec.dim(), "dilation_step");
  return DilationChannel(spec, dt)(rho);
}

EvolutionResult evolve_dilation(const LindbladSpec& spec, const DensityMatrix& rho0, double t_total,
                                double dt) {
  require_dim(rho0.matrix(), spec.dim(), "evolve_dilation");
  if (!(dt > 0.0)) throw ParameterError("evolve_dilation: dt must be positive");
  const double ratio = t_total / dt;
  const auto steps = static_cast<long>(std::llround(ratio));
  if (steps < 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    throw ParameterError("evolve_dilation: t_total must be an integer multiple of dt");
  }
  const DilationChannel channel(spec, dt);
  EvolutionResult out;
  out.method = EvolutionMethod::dilation;
  ComplexMatrix rho = rho0.matrix();
  for (long k = 0; k <= steps; ++k) {
    if (k > 0) rho = channel.apply_raw(rho);
    StepDiagnostics diag;
    out.states.push_back(checked_state(rho, &diag));
    out.diagnostics.push_back(diag);
    out.times.push_back(static_cast<double>(k) * dt);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fixed points

StationaryResult stationary_state(const SuperOperator& superop) {
  const Index d = superop.dim;
  if (d > kSuperOperatorGuard) throw DimensionError("stationary_state: dimension guard exceeded");
  const Index n = d * d;

  StationaryResult out{DensityMatrix::maximally_mixed(d), 0.0, false, false, 0.0, {}};
  if (d <= kSpectralGuard) {
    out.spectrum = eig_general(superop.mat, false).eigenvalues;
    out.spectrum_computed = true;
    Index nearest = 0;
    int null_count = 0;
    for (Index k = 0; k < n; ++k) {
      if (std::abs(out.spectrum(k)) < std::abs(out.spectrum(nearest))) nearest = k;
      if (std::abs(out.spectrum(k)) <= kNullTolerance) ++null_count;
    }
    if (std::abs(out.spectrum(nearest)) > kNullTolerance) {
      throw NoFixedPointError("stationary_state: no eigenvalue within 1e-8 of zero");
    }
    out.unique = null_count == 1;
    double top = -std::numeric_limits<double>::infinity();
    for (Index k = 0; k < n; ++k) {
      if (k == nearest || std::abs(out.spectrum(k)) <= kGapFloor) continue;
      top = std::max(top, out.spectrum(k).real());
    }
    out.gap = std::isfinite(top) ? -top : 0.0;
  } else {
    out.gap = std::numeric_limits<double>::quiet_NaN();
  }

  // Null vector with unit trace by least squares on [L; vec(I)^dagger].
  ComplexMatrix sys(n + 1, n);
  sys.topRows(n) = superop.mat;
  sys.row(n) = vectorize(ComplexMatrix::Identity(d, d)).transpose();
  ComplexVector rhs = ComplexVector::Zero(n + 1);
  rhs(n) = 1.0;
  const ComplexVector x = sys.colPivHouseholderQr().solve(rhs);
  const double null_residual = (superop.mat * x).norm();
  if (!out.spectrum_computed && null_residual > kNullTolerance) {
    throw NoFixedPointError("stationary_state: generator has no trace-one null vector");
  }
  if (!out.spectrum_computed) out.unique = true;
  out.state = DensityMatrix::project(unvectorize(x));
  out.residual = trace_norm(unvectorize(superop.mat * vectorize(out.state.matrix())));
  return out;
}

StationaryResult stationary_state(const LindbladSpec& spec) {
  return stationary_state(assemble(spec));
}

// ---------------------------------------------------------------------------
// Mixing

MixingReport mixing_time(const LindbladSpec& spec, const DensityMatrix& sigma, double eta,
                         const MixingOptions& options) {
  spec.validate();
  const Index d = spec.dim();
  require_dim(sigma.matrix(), d, "mixing_time");
  if (!(eta > 0.0)) throw ParameterError("mixing_time: eta must be positive");
  if (!(options.coarse_step > 0.0)) throw ParameterError("mixing_time: coarse_step must be positive");
  if (options.random_probes < 0) throw ParameterError("mixing_time: random_probes must be >= 0");

  MixingReport report;
  report.eta = eta;
  report.lower_bound = true;

  std::vector<std::pair<std::string, ComplexMatrix>> probes;
  for (Index k = 0; k < d; ++k) {
    probes.emplace_back("basis " + std::to_string(k), DensityMatrix::basis_state(d, k).matrix());
  }
  for (int r = 0; r < options.random_probes; ++r) {
    probes.emplace_back("haar " + std::to_string(r),
                        DensityMatrix::pure(haar_state(d, options.seed + static_cast<std::uint64_t>(r))).matrix());
  }
  probes.emplace_back("maximally mixed", DensityMatrix::maximally_mixed(d).matrix());
  for (const auto& [label, rho] : options.extra_probes) {
    require_dim(rho.matrix(), d, "mixing_time probe");
    probes.emplace_back(label, rho.matrix());
  }
  report.probe_description = std::to_string(d) + " computational basis states, " +
                             std::to_string(options.random_probes) + " Haar-random pure states (seed " +
                             std::to_string(options.seed) + "), the maximally mixed state, " +
                             std::to_string(options.extra_probes.size()) + " extra probes";

  report.spectral_gap = std::numeric_limits<double>::quiet_NaN();
  std::optional<SuperOperator> L;
  if (d <= kSuperOperatorGuard) L = assemble(spec);
  if (d <= kSpectralGuard) {
    const ComplexVector ev = eig_general(L->mat, false).eigenvalues;
    Index nearest = 0;
    int null_count = 0;
    for (Index k = 0; k < ev.size(); ++k) {
      if (std::abs(ev(k)) < std::abs(ev(nearest))) nearest = k;
      if (std::abs(ev(k)) <= kNullTolerance) ++null_count;
    }
    if (null_count > 1) throw DomainError("mixing_time: the fixed point is not unique");
    double top = -std::numeric_limits<double>::infinity();
    for (Index k = 0; k < ev.size(); ++k) {
      if (k == nearest || std::abs(ev(k)) <= kGapFloor) continue;
      top = std::max(top, ev(k).real());
    }
    report.spectral_gap = std::isfinite(top) ? -top : 0.0;
  } else {
    report.warnings.push_back("dimension " + std::to_string(d) +
                              " above the spectral guard: uniqueness and gap not computed");
  }

  if (eta >= 2.0) {
    for (const auto& [label, rho] : probes) report.probes.push_back({label, 0.0});
    report.tau_mix = 0.0;
    return report;
  }

  const double h = options.coarse_step;
  const Generator gen(spec);
  const double dt_rk4 = 0.1 / std::max(spec.norm_estimate(), 1e-12);
  const bool use_propagator = d <= kSpectralGuard;
  const bool exact_refine = d <= 16;
  ComplexMatrix coarse;
  if (use_propagator) coarse = expm(L->mat * h);

  auto advance = [&](const ComplexMatrix& rho, double t, bool coarse_step) -> ComplexMatrix {
    if (coarse_step && use_propagator) return hermitian_part(unvectorize(coarse * vectorize(rho)));
    if (exact_refine) return hermitian_part(unvectorize(expm(L->mat * t) * vectorize(rho)));
    return rk4_propagate(gen, rho, t, dt_rk4);
  };

  const ComplexMatrix& target = sigma.matrix();
  report.tau_mix = 0.0;
  for (const auto& [label, rho0] : probes) {
    ComplexMatrix rho = rho0;
    double t = 0.0;
    double dist = distance_to(rho, target);
    ComplexMatrix prev = rho;
    while (dist > eta && t < options.t_max) {
      prev = rho;
      rho = advance(rho, h, true);
      t += h;
      dist = distance_to(rho, target);
    }
    double hit = t;
    if (dist > eta) {
      hit = std::numeric_limits<double>::infinity();
      report.warnings.push_back("probe '" + label + "' did not reach eta within t_max");
    } else if (t > 0.0) {
      double lo = t - h;
      double hi = t;
      while (hi - lo > options.relative_tolerance * hi) {
        const double mid = 0.5 * (lo + hi);
        ComplexMatrix trial = advance(prev, mid - lo, false);
        if (distance_to(trial, target) <= eta) {
          hi = mid;
        } else {
          lo = mid;
          prev = std::move(trial);
        }
      }
      hit = hi;
    }
    report.probes.push_back({label, hit});
    report.tau_mix = std::max(report.tau_mix, hit);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Detailed balance

double kms_residual(const LindbladSpec& spec, const DensityMatrix& sigma) {
  spec.validate();
  const Index d = spec.dim();
  require_dim(sigma.matrix(), d, "kms_residual");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sigma.matrix());
  const RealVector p = es.eigenvalues();
  if (!(p.minCoeff() > 0.0)) throw DomainError("kms_residual: sigma is rank deficient");
  const ComplexMatrix& W = es.eigenvectors();
  const RealVector s = p.cwiseSqrt();

  LindbladSpec rotated;
  rotated.G = W.adjoint() * spec.G * W;
  const double equal_tol = 1e-12 * p.maxCoeff();
  for (Index b = 0; b < d; ++b) {
    for (Index a = 0; a < d; ++a) {
      if (std::abs(p(a) - p(b)) <= equal_tol) rotated.G(a, b) = 0.0;
    }
  }
  rotated.G = hermitian_part(rotated.G);
  for (const auto& jump : spec.jumps) rotated.jumps.push_back({W.adjoint() * jump.K * W, jump.weight});
  const SuperOperator L = assemble(rotated);

  const Index n = d * d;
  RealVector weight(n);
  for (Index a2 = 0; a2 < d; ++a2) {
    for (Index a1 = 0; a1 < d; ++a1) weight(a1 + a2 * d) = s(a1) * s(a2);
  }
  double residual = 0.0;
  for (Index b = 0; b < n; ++b) {
    for (Index a = 0; a < n; ++a) {
      residual = std::max(residual,
                          std::abs(L.mat(a, b) * weight(b) - weight(a) * std::conj(L.mat(b, a))));
    }
  }
  return residual;
}

// ---------------------------------------------------------------------------
// Error order

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw FitError("fit_line: need at least two points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw FitError("fit_line: abscissae are all equal");
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (out.intercept + out.slope * x[i]);
    ss_res += r * r;
  }
  out.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return out;
}

ErrorOrder channel_error_order(const LindbladSpec& spec, const DensityMatrix& rho0,
                               const std::vector<double>& dts, double total_time) {
  if (dts.size() < 4) throw ParameterError("channel_error_order: need at least four dt values");
  if (!(total_time > 0.0)) throw ParameterError("channel_error_order: total time must be positive");
  const SuperOperator L = assemble(spec);
  require_dim(rho0.matrix(), L.dim, "channel_error_order");
  const ComplexVector v0 = vectorize(rho0.matrix());
  const ComplexMatrix exact_total = unvectorize(expm(L.mat * total_time) * v0);

  ErrorOrder out;
  out.total_time = total_time;
  std::vector<double> lx, ls, la;
  for (double dt : dts) {
    if (!(dt > 0.0)) throw ParameterError("channel_error_order: dt values must be positive");
    const double ratio = total_time / dt;
    const auto steps = static_cast<long>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio) {
      throw ParameterError("channel_error_order: total time must be a multiple of every dt");
    }
    const DilationChannel channel(spec, dt);
    const ComplexMatrix exact_step = unvectorize(expm(L.mat * dt) * v0);
    const double single = trace_norm(hermitian_part(channel.apply_raw(rho0.matrix()) - exact_step));
    ComplexMatrix rho = rho0.matrix();
    for (long k = 0; k < steps; ++k) rho = channel.apply_raw(rho);
    const double accumulated = trace_norm(hermitian_part(rho - exact_total));
    if (!(single > 0.0) || !(accumulated > 0.0)) {
      throw FitError("channel_error_order: zero error, slopes are undefined");
    }
    out.dts.push_back(dt);
    out.single_step_errors.push_back(single);
    out.accumulated_errors.push_back(accumulated);
    lx.push_back(std::log(dt));
    ls.push_back(std::log(single));
    la.push_back(std::log(accumulated));
  }
  out.single = fit_line(lx, ls);
  out.accumulated = fit_line(lx, la);
  return out;
}

}  // namespace dissiprep
