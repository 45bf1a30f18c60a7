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

// Acceptance suite: one PASS/FAIL line per criterion. Exits 0 once every
// criterion has been evaluated; pass --strict to exit 1 on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dissiprep/engine.hpp"
#include "dissiprep/jumps.hpp"
#include "dissiprep/quasilocality.hpp"
#include "dissiprep/scenarios.hpp"

using namespace dissiprep;
namespace sc = dissiprep::scenarios;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

LindbladSpec tfim_ground_spec(const HamiltonianSpec& h) {
  const FilterSpec f = ground_filter(*h.gap_hint, h.norm_bound());
  return LindbladSpec::make(ComplexMatrix::Zero(h.dim(), h.dim()), ground_jumps(h, default_couplings(h.geometry), f));
}

LindbladSpec amplitude_damping() {
  ComplexMatrix k = ComplexMatrix::Zero(2, 2);
  k(0, 1) = 1.0;
  return LindbladSpec::make(ComplexMatrix::Zero(2, 2), {{k, 1.0}});
}

std::vector<double> default_dts() {
  std::vector<double> dts;
  for (int k = 4; k <= 10; ++k) dts.push_back(std::ldexp(1.0, -k));
  return dts;
}

sc::Json run_scenario(sc::Json config, const std::string& tag) {
  const std::filesystem::path out = std::filesystem::temp_directory_path() / ("dissiprep_acceptance_" + tag);
  std::filesystem::remove_all(out);
  config["output"] = out.string();
  const sc::RunResult r = sc::run(sc::resolve(config));
  if (r.exit_code != sc::kExitOk) throw Error(tag + " exited " + std::to_string(r.exit_code) + ": " + r.message);
  return r.manifest["metrics"];
}

// 1. Ground fixed point.
void fixed_point_ground(Outcome& o) {
  for (int n : {2, 3, 4}) {
    const HamiltonianSpec h = tfim_chain(n, 1.0, 1.0);
    const EigenDecomposition e = eig_hermitian(h.dense);
    const LindbladSpec spec = tfim_ground_spec(h);
    const DensityMatrix ground = DensityMatrix::pure(e.eigenvectors.col(0));
    const double fid = fidelity_pure(stationary_state(spec).state.matrix(), e.eigenvectors.col(0));
    const double res = trace_norm(dissiprep::apply(spec, ground));
    o.detail << "n=" << n << " 1-F=" << fmt(1.0 - fid) << " res=" << fmt(res) << "; ";
    o.require(fid >= 1.0 - 1e-8, "fidelity n=" + std::to_string(n));
    o.require(res <= 1e-9, "residual n=" + std::to_string(n));
  }
}

// 2. Quadrature jump equals eigenbasis jump.
void quadrature_equivalence(Outcome& o) {
  const HamiltonianSpec h = tfim_chain(3, 1.0, 1.0);
  const EigenDecomposition e = eig_hermitian(h.dense);
  const FilterSpec f = ground_filter(*h.gap_hint, h.norm_bound());
  for (const ComplexMatrix& a : default_couplings(h.geometry)) {
    const ComplexMatrix ref = ground_jump_eigenbasis(h.dense, e, a, f).K;
    double last = operator_norm(quadrature_jump(h.dense, a, f, build_quadrature(f)) - ref);
    o.require(last <= 1e-6, "default mismatch");
    o.detail << "M=" << f.truncation.M << ":" << fmt(last);
    for (int M = 2 * f.truncation.M; M <= 4 * f.truncation.M; M *= 2) {
      const double m = operator_norm(quadrature_jump(h.dense, a, f, build_quadrature(f, M)) - ref);
      o.detail << " M=" << M << ":" << fmt(m);
      o.require(m <= std::max(0.5 * last, 1e-8), "halving at M=" + std::to_string(M));
      last = m;
    }
    o.detail << "; ";
  }
}

// 3. Dilation error orders.
void dilation_orders(Outcome& o) {
  const HamiltonianSpec h = tfim_chain(2, 1.0, 1.0);
  const EigenDecomposition e = eig_hermitian(h.dense);
  const std::vector<std::pair<std::string, std::pair<LindbladSpec, DensityMatrix>>> cases = {
      {"amplitude damping", {amplitude_damping(), DensityMatrix::basis_state(2, 1)}},
      {"tfim n=2", {tfim_ground_spec(h), DensityMatrix::pure(e.eigenvectors.col(3))}},
  };
  for (const auto& [name, c] : cases) {
    const ErrorOrder r = channel_error_order(c.first, c.second, default_dts(), 2.0);
    o.detail << name << ": single " << fmt(r.single.slope) << " (R2 " << fmt(r.single.r_squared) << "), accumulated "
             << fmt(r.accumulated.slope) << " (R2 " << fmt(r.accumulated.r_squared) << "); ";
    o.require(std::abs(r.single.slope - 2.0) <= 0.2 && r.single.r_squared >= 0.99, name + " single-step");
    o.require(std::abs(r.accumulated.slope - 1.0) <= 0.2 && r.accumulated.r_squared >= 0.99, name + " accumulated");
  }
}

// 4. Gibbs fixed point and KMS detailed balance.
void gibbs_kms(Outcome& o) {
  double worst_distance = 0.0, worst_kms = 0.0, weakest_control = 1e300;
  for (int n : {2, 3}) {
    const HamiltonianSpec h = tfim_chain(n, 1.0, 1.0);
    const EigenDecomposition e = eig_hermitian(h.dense);
    for (double beta : {0.2, 1.0, 5.0}) {
      const DensityMatrix target = gibbs_state(h, beta);
      auto spec_for = [&](double filter_beta) {
        const FilterSpec f = thermal_single_jump_filter(filter_beta, default_thermal_sigma(filter_beta), h.norm_bound());
        std::vector<Jump> jumps;
        for (const ComplexMatrix& a : default_couplings(h.geometry)) jumps.push_back({filtered_jump(e, a, f.freq_profile), 1.0});
        return LindbladSpec::make(solve_coherent_term(e, jumps, target).G, jumps);
      };
      const LindbladSpec spec = spec_for(beta);
      worst_distance = std::max(worst_distance, trace_distance(stationary_state(spec).state, target));
      worst_kms = std::max(worst_kms, kms_residual(spec, target));
      weakest_control = std::min(weakest_control, kms_residual(spec_for(2.0 * beta), target));
    }
  }
  o.detail << "max distance " << fmt(worst_distance) << ", max kms " << fmt(worst_kms) << ", min control "
           << fmt(weakest_control);
  o.require(worst_distance <= 1e-7, "stationary distance");
  o.require(worst_kms <= 1e-8, "kms residual");
  o.require(weakest_control > 1e-3, "negative control");
}

// 5. Convergence from a state orthogonal to the target.
void zero_overlap(Outcome& o) {
  const HamiltonianSpec h = tfim_chain(3, 1.0, 1.0);
  const EigenDecomposition e = eig_hermitian(h.dense);
  const LindbladSpec spec = tfim_ground_spec(h);
  const DensityMatrix top = DensityMatrix::pure(e.eigenvectors.col(7));
  MixingOptions options;
  options.extra_probes = {{"top eigenstate", top}};
  const MixingReport r = mixing_time(spec, DensityMatrix::pure(e.eigenvectors.col(0)), 0.01, options);
  const double t = 1.5 * r.tau_mix;
  const double fid = fidelity_pure(evolve_expm(spec, top, {0.0, t}).states.back().matrix(), e.eigenvectors.col(0));
  o.detail << "overlap " << fmt(std::abs(e.eigenvectors.col(7).dot(e.eigenvectors.col(0)))) << ", tau_mix(0.01) "
           << fmt(r.tau_mix) << ", fidelity at 1.5 tau " << fmt(fid);
  o.require(fid >= 0.999, "fidelity");
}

// 6. Excited-state preparation.
void excited(Outcome& o) {
  const sc::Json projected = run_scenario({{"scenario", "prepare-excited"}, {"evolve", {{"t_max", 200.0}, {"dt", 10.0}}}}, "projected");
  const sc::Json squared = run_scenario({{"scenario", "prepare-excited"},
                                         {"model", {{"model", "random_local"}, {"n", 3}, {"k", 2}, {"seed", 11}}},
                                         {"jump", {{"family", "excited_squared"}}},
                                         {"evolve", {{"t_max", 200.0}, {"dt", 10.0}, {"initial", "haar"}}}},
                                        "squared");
  const double fp = projected["final_fidelity"].get<double>();
  const double fs = squared["final_fidelity"].get<double>();
  o.detail << "projected F=" << fmt(fp) << ", squared F=" << fmt(fs);
  o.require(fp >= 0.999, "projected");
  o.require(fs >= 0.999, "squared");
}

// 7. Singular vector and non-normal eigenvector.
void singular(Outcome& o) {
  const sc::Json s = run_scenario({{"scenario", "prepare-singular"}}, "singular");
  const sc::Json n = run_scenario({{"scenario", "prepare-nonnormal"}}, "nonnormal");
  const double fid = s["stationary_fidelity"].get<double>();
  const double rel = n["relative_residual"].get<double>();
  o.detail << "stationary F=" << fmt(fid) << ", |Av - lv|/|A|=" << fmt(rel);
  o.require(fid >= 0.999, "singular fidelity");
  o.require(rel <= 1e-3, "eigen residual");
}

// 8. Quasi-locality of the ground jump.
void quasilocality(Outcome& o) {
  const sc::Json m = run_scenario({{"scenario", "quasilocality"}}, "quasilocality");
  const int nonzero = m["nonzero_shells"].get<int>();
  const bool monotone = m["monotone_beyond_r1"].get<bool>();
  const double mu = m["mu_decay"].is_null() ? -1.0 : m["mu_decay"].get<double>();
  o.detail << "norms [";
  for (const auto& v : m["shell_norms"]) o.detail << fmt(v.get<double>()) << " ";
  o.detail << "] mu_decay " << fmt(mu) << "; ";
  o.require(nonzero >= 4, "nonzero shells");
  o.require(monotone, "monotone beyond r=1");
  o.require(mu > 0.0, "mu_decay > 0");

  std::vector<int> radii{0, 1, 2, 3, 4, 5, 6};
  std::vector<double> norms;
  for (int r : radii) norms.push_back(std::exp(-0.7 * r));
  const double err = std::abs(decay_fit(radii, norms).mu_decay - 0.7);
  o.detail << "synthetic error " << fmt(err);
  o.require(err <= 1e-10, "synthetic recovery");
}

// 9. Amplitude-damping mixing anchor.
void mixing_anchor(Outcome& o) {
  MixingOptions options;
  options.random_probes = 0;
  const MixingReport r = mixing_time(amplitude_damping(), DensityMatrix::basis_state(2, 0), 0.01, options);
  const double gap = stationary_state(amplitude_damping()).gap;
  o.detail << "tau " << fmt(r.tau_mix) << " vs ln200 " << fmt(std::log(200.0)) << ", gap " << gap;
  o.require(std::abs(r.tau_mix - std::log(200.0)) <= 1e-2, "tau_mix");
  o.require(std::abs(gap - 0.5) <= 1e-10, "gap");
}

// 10. Mixing scaling report.
void mixing_scaling(Outcome& o) {
  const sc::Json m = run_scenario({{"scenario", "mixing-scan"}, {"n_list", {2, 3, 4, 5, 6}}}, "mixing");
  o.detail << "tau [";
  for (const auto& row : m["per_n"]) o.detail << fmt(row["tau_mix"].get<double>()) << " ";
  o.detail << "]";
  const bool has_fit = !m["power_law_fit"].is_null();
  if (has_fit) o.detail << " exponent " << fmt(m["power_law_fit"]["exponent"].get<double>());
  o.require(m["per_n"].size() == 5, "all n evaluated");
  o.require(m["monotone_nondecreasing"].get<bool>(), "monotone series");
  o.require(has_fit, "power-law fit");
}

// 11. Invariant suite over seeded specs.
void invariants(Outcome& o) {
  int checks = 0, failures = 0;
  std::set<std::string> failed;
  auto check = [&](bool ok, const char* what) {
    ++checks;
    if (!ok) {
      ++failures;
      failed.insert(what);
    }
  };
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (Index d : {2, 3, 4, 6}) {
      std::vector<Jump> jumps;
      for (int k = 0; k < 3; ++k) jumps.push_back({random_matrix(d, d, seed * 31 + k) / std::sqrt(double(d)), 0.3 + k});
      const LindbladSpec spec = LindbladSpec::make(random_hermitian(d, seed), jumps);
      for (std::uint64_t p = 0; p < 3; ++p) {
        const ComplexMatrix rho = DensityMatrix::pure(haar_state(d, seed * 97 + p)).matrix();
        const ComplexMatrix out = dissiprep::apply(spec, rho);
        check(std::abs(out.trace()) <= 1e-12, "trace preservation");
        check(hermiticity_defect(out) <= 1e-12, "hermiticity preservation");
      }
      check(eig_general(assemble(spec).mat, false).eigenvalues.real().maxCoeff() <= 1e-10, "dissipativity");
      for (double dt : {1e-3, 0.05, 0.5}) {
        const ComplexMatrix choi = DilationChannel(spec, dt).choi();
        check(eig_hermitian(hermitian_part(choi)).eigenvalues.minCoeff() >= -1e-10, "choi positivity");
        ComplexMatrix tr = ComplexMatrix::Zero(d, d);
        for (Index i = 0; i < d; ++i) {
          for (Index j = 0; j < d; ++j) tr(i, j) = choi.block(i * d, j * d, d, d).trace();
        }
        check((tr - ComplexMatrix::Identity(d, d)).norm() <= 1e-12, "choi trace preservation");
      }
    }
  }
  for (int n : {2, 3, 4}) {
    for (double g : {0.5, 1.0, 1.5}) {
      const HamiltonianSpec h = tfim_chain(n, g, 1.0);
      const EigenDecomposition e = eig_hermitian(h.dense);
      const FilterSpec f = ground_filter(*h.gap_hint, h.norm_bound());
      for (const ComplexMatrix& a : default_couplings(h.geometry)) {
        const ComplexMatrix K = ground_jump_eigenbasis(h.dense, e, a, f).K;
        const ComplexMatrix k = e.eigenvectors.adjoint() * K * e.eigenvectors;
        double leak = 0.0;
        for (Index j = 0; j < k.cols(); ++j) {
          for (Index i = 0; i < k.rows(); ++i) {
            if (e.eigenvalues(i) >= e.eigenvalues(j) - 1e-12) leak = std::max(leak, std::abs(k(i, j)));
          }
        }
        check(leak <= 1e-12, "downward triangularity");
        check((K * e.eigenvectors.col(0)).norm() <= 1e-12, "annihilation");
      }
    }
    const HamiltonianSpec r = random_local_hamiltonian(LatticeGeometry::chain(n), 2, 40 + n);
    const EigenDecomposition e = eig_hermitian(r.dense);
    const FilterSpec f = ground_filter(*r.gap_hint, r.norm_bound());
    for (const ComplexMatrix& a : default_couplings(r.geometry)) {
      check((ground_jump_eigenbasis(r.dense, e, a, f).K * e.eigenvectors.col(0)).norm() <= 1e-12, "annihilation");
    }
  }
  o.detail << checks - failures << "/" << checks << " checks passed";
  for (const std::string& f : failed) o.detail << " [" << f << "]";
  o.require(failures == 0, "invariants");
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<void(Outcome&)> body;
};

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  const std::vector<Criterion> criteria = {
      {"fixed point (ground)", 10, fixed_point_ground},
      {"quadrature equals eigenbasis jump", 30, quadrature_equivalence},
      {"dilation error orders", 30, dilation_orders},
      {"gibbs fixed point and KMS", 60, gibbs_kms},
      {"zero-overlap convergence", 20, zero_overlap},
      {"excited-state preparation", 60, excited},
      {"singular-vector preparation", 60, singular},
      {"quasi-locality", 120, quasilocality},
      {"mixing analytic anchor", 5, mixing_anchor},
      {"mixing scaling report", 600, mixing_scaling},
      {"invariant suite", 120, invariants},
  };
  int passed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[k].body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "]";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(seconds <= criteria[k].budget_seconds, "runtime budget");
    passed += o.pass ? 1 : 0;
    std::printf("%s %2zu %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].name, seconds,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", passed, criteria.size());
  return strict && passed != static_cast<int>(criteria.size()) ? 1 : 0;
}
