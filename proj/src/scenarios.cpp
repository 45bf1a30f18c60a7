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

#include "dissiprep/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "dissiprep/engine.hpp"
#include "dissiprep/filters.hpp"
#include "dissiprep/jumps.hpp"
#include "dissiprep/models.hpp"
#include "dissiprep/quasilocality.hpp"

namespace dissiprep::scenarios {

namespace {

constexpr int kSchemaVersion = 1;

const std::vector<std::pair<std::string, std::string>> kScenarios = {
    {"prepare-ground", "ground-state preparation with filtered jumps"},
    {"prepare-gibbs", "thermal-state preparation with a solved coherent term"},
    {"prepare-excited", "excited-state preparation (projected or squared Hamiltonian)"},
    {"prepare-singular", "ground singular vector of a matrix T"},
    {"prepare-nonnormal", "eigenvector of a non-normal matrix by singular-value search"},
    {"mixing-scan", "mixing time versus chain length with a power-law fit"},
    {"quasilocality", "shell decomposition and decay fit of a ground jump"},
    {"error-order", "single-step and accumulated error order of the dilation channel"},
};

// ---------------------------------------------------------------------------
// Config resolution

[[noreturn]] void config_error(const std::string& msg) { throw ConfigError(msg); }

void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

// Copies obj[key] (checked against the type of the default) or the default.
void take(Json& out, const Json& obj, const std::string& key, const Json& fallback,
          const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) {
    out[key] = fallback;
    return;
  }
  const Json& v = obj.at(key);
  if (!fallback.is_null()) {
    const bool ok = (fallback.is_number() && v.is_number()) || (fallback.is_string() && v.is_string()) ||
                    (fallback.is_boolean() && v.is_boolean()) || (fallback.is_array() && v.is_array()) ||
                    (fallback.is_object() && v.is_object());
    if (!ok) config_error(where + "." + key + " has the wrong type");
    if (fallback.is_number_integer() && !v.is_number_integer()) {
      config_error(where + "." + key + " must be an integer");
    }
  } else if (!v.is_number()) {
    config_error(where + "." + key + " must be a number");
  }
  out[key] = v;
}

Json section(const Json& raw, const std::string& name) {
  if (!raw.contains(name)) return Json::object();
  if (!raw.at(name).is_object()) config_error(name + " must be an object");
  return raw.at(name);
}

Json resolve_model(const Json& raw, const std::string& scenario) {
  const Json m = section(raw, "model");
  std::string default_model = "tfim";
  if (scenario == "prepare-singular" || scenario == "prepare-nonnormal") default_model = "random_matrix";
  if (scenario == "error-order") default_model = "amplitude_damping";
  const std::string kind = m.value("model", default_model);
  Json out = Json::object();
  out["model"] = kind;
  const std::string where = "model";
  if (kind == "tfim") {
    reject_unknown(m, {"model", "n", "g", "J"}, where);
    take(out, m, "n", scenario == "quasilocality" ? 8 : 3, where);
    take(out, m, "g", 1.0, where);
    take(out, m, "J", 1.0, where);
  } else if (kind == "pauli_terms") {
    reject_unknown(m, {"model", "n", "terms"}, where);
    take(out, m, "n", 2, where);
    if (!m.contains("terms") || !m.at("terms").is_array()) config_error("model.terms must be an array");
    for (const auto& t : m.at("terms")) {
      if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_string()) {
        config_error("model.terms entries must be [coefficient, \"X0 X1\"]");
      }
    }
    out["terms"] = m.at("terms");
  } else if (kind == "random_local") {
    reject_unknown(m, {"model", "n", "k", "seed"}, where);
    take(out, m, "n", 3, where);
    take(out, m, "k", 2, where);
    take(out, m, "seed", 11, where);
  } else if (kind == "random_matrix") {
    reject_unknown(m, {"model", "rows", "cols", "seed"}, where);
    const int size = scenario == "prepare-nonnormal" ? 6 : 8;
    take(out, m, "rows", size, where);
    take(out, m, "cols", size, where);
    take(out, m, "seed", 7, where);
  } else if (kind == "amplitude_damping") {
    reject_unknown(m, {"model", "gamma"}, where);
    take(out, m, "gamma", 1.0, where);
  } else {
    config_error("unknown model '" + kind + "'");
  }
  return out;
}

Json resolve_filter(const Json& raw, const std::string& scenario) {
  const Json f = section(raw, "filter");
  reject_unknown(f, {"kind", "delta", "e_max", "beta", "sigma_omega", "mu", "S", "M"}, "filter");
  Json out = Json::object();
  const std::string kind_default = scenario == "prepare-gibbs" ? "thermal_single_jump" : "ground";
  take(out, f, "kind", kind_default, "filter");
  take(out, f, "delta", nullptr, "filter");
  take(out, f, "e_max", nullptr, "filter");
  take(out, f, "beta", scenario == "prepare-gibbs" ? Json(1.0) : Json(nullptr), "filter");
  take(out, f, "sigma_omega", nullptr, "filter");
  take(out, f, "mu", nullptr, "filter");
  take(out, f, "S", nullptr, "filter");
  take(out, f, "M", nullptr, "filter");
  return out;
}

Json resolve_jump(const Json& raw, const std::string& scenario) {
  const Json j = section(raw, "jump");
  reject_unknown(j, {"family", "coupling", "coupling_seed", "method", "mu", "delta", "weight_rule",
                     "omega_points", "lambda_grid"},
                 "jump");
  std::string family = "ground";
  if (scenario == "prepare-gibbs") family = "gibbs_single";
  if (scenario == "prepare-excited") family = "excited_projected";
  if (scenario == "prepare-singular") family = "singular";
  if (scenario == "prepare-nonnormal") family = "nonnormal";
  Json out = Json::object();
  take(out, j, "family", family, "jump");
  const std::string fam = out["family"];
  static const std::set<std::string> families = {"ground",          "gibbs_family",      "gibbs_single",
                                                 "excited_squared", "excited_projected", "singular",
                                                 "nonnormal",       "amplitude_damping"};
  if (!families.count(fam)) config_error("unknown jump family '" + fam + "'");
  std::string coupling_default = "default";
  if (scenario == "prepare-singular" || scenario == "prepare-nonnormal") coupling_default = "random";
  if (scenario == "prepare-excited") coupling_default = "xz";
  if (j.contains("coupling") && !(j.at("coupling").is_string() || j.at("coupling").is_array())) {
    config_error("jump.coupling must be \"default\", \"xz\", \"random\" or a list of Pauli strings");
  }
  out["coupling"] = j.value("coupling", Json(coupling_default));
  if (out["coupling"].is_array()) {
    for (const auto& c : out["coupling"]) {
      if (!c.is_string()) config_error("jump.coupling entries must be strings");
    }
  } else if (out["coupling"] != "default" && out["coupling"] != "xz" && out["coupling"] != "random") {
    config_error("jump.coupling must be \"default\", \"xz\", \"random\" or a list of Pauli strings");
  }
  take(out, j, "coupling_seed", 5, "jump");
  take(out, j, "method", "eigenbasis", "jump");
  if (out["method"] != "eigenbasis" && out["method"] != "quadrature") {
    config_error("jump.method must be eigenbasis or quadrature");
  }
  take(out, j, "mu", nullptr, "jump");
  take(out, j, "delta", nullptr, "jump");
  take(out, j, "weight_rule", "metropolis_kms", "jump");
  try {
    weight_rule_from_string(out["weight_rule"]);
  } catch (const ParameterError& e) {
    config_error(e.what());
  }
  take(out, j, "omega_points", 201, "jump");
  const Json g = j.value("lambda_grid", Json::object());
  reject_unknown(g, {"center_re", "center_im", "half_width", "points", "refinements"}, "jump.lambda_grid");
  Json grid = Json::object();
  take(grid, g, "center_re", 0.0, "jump.lambda_grid");
  take(grid, g, "center_im", 0.0, "jump.lambda_grid");
  take(grid, g, "half_width", nullptr, "jump.lambda_grid");
  take(grid, g, "points", 21, "jump.lambda_grid");
  take(grid, g, "refinements", 4, "jump.lambda_grid");
  out["lambda_grid"] = grid;
  return out;
}

Json resolve_evolve(const Json& raw, const std::string& scenario) {
  const Json e = section(raw, "evolve");
  reject_unknown(e, {"method", "t_max", "dt", "initial", "record_every"}, "evolve");
  Json out = Json::object();
  take(out, e, "method", "expm", "evolve");
  const std::string method = out["method"];
  if (method != "expm" && method != "rk4" && method != "dilation") {
    config_error("evolve.method must be expm, rk4 or dilation");
  }
  take(out, e, "t_max", scenario == "error-order" ? 2.0 : 40.0, "evolve");
  take(out, e, "dt", method == "rk4" ? 0.01 : (method == "dilation" ? 0.01 : 0.5), "evolve");
  std::string initial = "top";
  if (scenario == "prepare-gibbs" || scenario == "prepare-singular") initial = "maximally_mixed";
  if (scenario == "prepare-excited") initial = "projected_haar";
  take(out, e, "initial", initial, "evolve");
  take(out, e, "record_every", 1, "evolve");
  return out;
}

Json resolve_probes(const Json& raw, const std::string& scenario) {
  const Json p = section(raw, "probes");
  reject_unknown(p, {"eta", "R", "seed", "coarse_step"}, "probes");
  Json out = Json::object();
  take(out, p, "eta", scenario == "mixing-scan" ? 0.1 : 0.01, "probes");
  take(out, p, "R", 8, "probes");
  take(out, p, "seed", 1, "probes");
  take(out, p, "coarse_step", 0.25, "probes");
  return out;
}

Json resolve_checks(const Json& raw) {
  const Json c = section(raw, "checks");
  reject_unknown(c, {"fixed_point_tolerance", "trace_drift_tolerance"}, "checks");
  Json out = Json::object();
  take(out, c, "fixed_point_tolerance", 1e-8, "checks");
  take(out, c, "trace_drift_tolerance", 1e-10, "checks");
  return out;
}

// ---------------------------------------------------------------------------
// Helpers shared by scenarios

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
    row_strings(header);
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> s;
    s.reserve(values.size());
    for (double v : values) s.push_back(format_double(v));
    row_strings(s);
  }
  void row_strings(const std::vector<std::string>& values) {
    for (std::size_t k = 0; k < values.size(); ++k) out_ << (k ? "," : "") << values[k];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

struct Context {
  Json config;
  Json metrics = Json::object();
  Json warnings = Json::array();
  std::vector<std::string> files;
  std::filesystem::path dir;
  double fixed_point_tolerance = 1e-8;
  double trace_drift_tolerance = 1e-10;

  std::filesystem::path file(const std::string& name) {
    files.push_back(name);
    return dir / name;
  }
};

HamiltonianSpec build_hamiltonian(const Json& m) {
  const std::string kind = m["model"];
  if (kind == "tfim") return tfim_chain(m["n"].get<int>(), m["g"].get<double>(), m["J"].get<double>());
  if (kind == "pauli_terms") {
    std::vector<PauliString> terms;
    for (const auto& t : m["terms"]) terms.push_back(PauliString::parse(t[0].get<double>(), t[1].get<std::string>()));
    return from_pauli_terms(LatticeGeometry::chain(m["n"].get<int>()), std::move(terms));
  }
  if (kind == "random_local") {
    return random_local_hamiltonian(LatticeGeometry::chain(m["n"].get<int>()), m["k"].get<int>(),
                                    m["seed"].get<std::uint64_t>());
  }
  throw ConfigError("model '" + kind + "' does not define a Hamiltonian for this scenario");
}

std::vector<ComplexMatrix> build_couplings(const Json& jump, const LatticeGeometry& geometry, Index dim) {
  const Json& c = jump["coupling"];
  if (c.is_string() && c == "default") return default_couplings(geometry);
  if (c.is_string() && c == "xz") {
    // Z preserves the parity that X flips, so no eigenstate is left dark.
    std::vector<ComplexMatrix> out = default_couplings(geometry);
    for (int k = 0; k < geometry.n_sites; ++k) out.push_back(pauli_site_operator(geometry, k, Pauli::Z));
    return out;
  }
  if (c.is_string() && c == "random") {
    ComplexMatrix a = random_hermitian(dim, jump["coupling_seed"].get<std::uint64_t>());
    return {a / operator_norm(a)};
  }
  std::vector<ComplexMatrix> out;
  for (const auto& s : c) out.push_back(pauli_string_operator(geometry, PauliString::parse(1.0, s.get<std::string>())));
  if (out.empty()) throw ConfigError("jump.coupling list is empty");
  return out;
}

// Fills a null config value with the derived default and returns it.
double resolve_value(Json& obj, const std::string& key, double derived) {
  if (obj[key].is_null()) obj[key] = derived;
  return obj[key].get<double>();
}

DensityMatrix initial_state(const std::string& spec, const EigenDecomposition& eig, Index dim,
                            std::uint64_t seed, const ComplexMatrix* projector) {
  if (spec == "top") return DensityMatrix::pure(eig.eigenvectors.col(dim - 1));
  if (spec == "maximally_mixed") return DensityMatrix::maximally_mixed(dim);
  if (spec == "haar") return DensityMatrix::pure(haar_state(dim, seed));
  if (spec == "projected_haar") {
    ComplexVector v = haar_state(dim, seed);
    if (projector) v = *projector * v;
    return DensityMatrix::pure(v);
  }
  if (spec.rfind("basis:", 0) == 0) {
    const Index k = std::stoll(spec.substr(6));
    if (k < 0 || k >= dim) throw ConfigError("evolve.initial basis index out of range");
    return DensityMatrix::basis_state(dim, k);
  }
  throw ConfigError("unknown evolve.initial '" + spec + "'");
}

// Runs the configured propagation and writes evolution.csv.
EvolutionResult evolve_and_record(Context& ctx, const LindbladSpec& spec, const DensityMatrix& rho0,
                                  const DensityMatrix& target, const ComplexMatrix& energy_op) {
  const Json& e = ctx.config["evolve"];
  const std::string method = e["method"];
  const double t_max = e["t_max"].get<double>();
  const double dt = e["dt"].get<double>();
  const int record_every = e["record_every"].get<int>();
  if (!(t_max >= 0.0) || !(dt > 0.0)) throw ConfigError("evolve.t_max must be >= 0 and evolve.dt > 0");
  if (record_every < 1) throw ConfigError("evolve.record_every must be >= 1");
  EvolutionResult result;
  if (method == "expm") {
    std::vector<double> grid;
    const auto steps = static_cast<long>(std::ceil(t_max / dt - 1e-9));
    for (long k = 0; k <= steps; ++k) grid.push_back(std::min(t_max, static_cast<double>(k) * dt));
    result = evolve_expm(spec, rho0, grid);
  } else if (method == "rk4") {
    result = evolve_rk4(spec, rho0, t_max, dt, record_every);
    if (result.step_size_warning) {
      ctx.warnings.push_back("rk4 step size exceeds 0.1 / ||L||; proceeding");
    }
  } else {
    result = evolve_dilation(spec, rho0, t_max, dt);
  }

  const bool pure_target = std::abs(target.matrix().squaredNorm() - 1.0) < 1e-10;
  ComplexVector target_vec;
  if (pure_target) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(target.matrix());
    target_vec = es.eigenvectors().col(target.dim() - 1);
  }
  CsvWriter csv(ctx.file("evolution.csv"), {"t", "distance", "fidelity", "energy", "trace_drift"});
  double final_distance = 0.0, final_fidelity = 0.0, max_drift = 0.0, min_floor = 1.0;
  for (std::size_t k = 0; k < result.states.size(); ++k) {
    const DensityMatrix& rho = result.states[k];
    const double t = result.times[k];
    const double distance = trace_distance(rho, target);
    const double fid = pure_target ? fidelity_pure(rho.matrix(), target_vec) : fidelity(rho, target);
    const double energy = (rho.matrix() * energy_op).trace().real();
    const double drift = result.diagnostics[k].trace_drift;
    csv.row({t, distance, fid, energy, drift});
    final_distance = distance;
    final_fidelity = fid;
    max_drift = std::max(max_drift, drift);
    min_floor = std::min(min_floor, result.diagnostics[k].positivity_floor);
    if (drift > ctx.trace_drift_tolerance * std::max(1.0, t)) {
      throw InvariantViolation("trace drift " + format_double(drift) + " at t = " + format_double(t));
    }
  }
  ctx.metrics["final_distance"] = final_distance;
  ctx.metrics["final_fidelity"] = final_fidelity;
  ctx.metrics["max_trace_drift"] = max_drift;
  ctx.metrics["min_positivity_floor"] = min_floor;
  return result;
}

void check_fixed_point(Context& ctx, const LindbladSpec& spec, const DensityMatrix& target) {
  const double residual = trace_norm(apply(spec, target));
  ctx.metrics["fixed_point_residual"] = residual;
  if (residual > ctx.fixed_point_tolerance) {
    throw InvariantViolation("fixed-point residual " + format_double(residual) + " exceeds " +
                             format_double(ctx.fixed_point_tolerance));
  }
}

void stationary_metrics(Context& ctx, const LindbladSpec& spec, const DensityMatrix& target) {
  if (spec.dim() > 16) {
    ctx.warnings.push_back("stationary state skipped above dimension 16");
    return;
  }
  const StationaryResult st = stationary_state(spec);
  ctx.metrics["stationary_distance"] = trace_distance(st.state, target);
  ctx.metrics["stationary_fidelity"] = fidelity(st.state, target);
  ctx.metrics["spectral_gap"] = json_number(st.gap);
  ctx.metrics["unique_fixed_point"] = st.unique;
}

// ---------------------------------------------------------------------------
// Scenarios

FilterSpec configured_ground_filter(Json& f, double gap_hint, double norm_hint) {
  if (f["kind"] != "ground") throw ConfigError("this scenario requires filter.kind = ground");
  const double delta = resolve_value(f, "delta", gap_hint);
  const double e_max = resolve_value(f, "e_max", norm_hint);
  FilterSpec filter = ground_filter(delta, e_max);
  if (!f["S"].is_null()) filter.truncation.S = f["S"].get<double>();
  if (f["M"].is_null()) {
    filter.truncation.M = default_node_count(filter.truncation.S, filter.bandwidth());
    f["M"] = filter.truncation.M;
  }
  filter.truncation.M = f["M"].get<int>();
  f["S"] = filter.truncation.S;
  return filter;
}

std::vector<Jump> build_ground_jumps(Context& ctx, const ComplexMatrix& H, const EigenDecomposition& eig,
                                     const std::vector<ComplexMatrix>& couplings, const FilterSpec& filter) {
  const bool quad = ctx.config["jump"]["method"] == "quadrature";
  std::optional<QuadratureGrid> grid;
  if (quad) grid = build_quadrature(filter);
  std::vector<Jump> jumps;
  double worst_leak = 0.0, worst_mismatch = 0.0;
  for (const auto& a : couplings) {
    JumpResult r = quad ? ground_jump_quadrature(H, eig, a, filter, *grid)
                        : ground_jump_eigenbasis(H, eig, a, filter);
    worst_leak = std::max(worst_leak, r.report.annihilation_residual);
    if (r.report.mismatch_vs_eigenbasis) worst_mismatch = std::max(worst_mismatch, *r.report.mismatch_vs_eigenbasis);
    jumps.push_back({std::move(r.K), 1.0});
  }
  ctx.metrics["annihilation_residual"] = worst_leak;
  if (quad) ctx.metrics["mismatch_vs_eigenbasis"] = worst_mismatch;
  return jumps;
}

void run_prepare_ground(Context& ctx) {
  Json& cfg = ctx.config;
  const HamiltonianSpec H = build_hamiltonian(cfg["model"]);
  const EigenDecomposition eig = eig_hermitian(H.dense);
  const FilterSpec filter = configured_ground_filter(cfg["filter"], *H.gap_hint, H.norm_bound());
  const auto couplings = build_couplings(cfg["jump"], H.geometry, H.dim());
  if (cfg["jump"]["family"] != "ground") throw ConfigError("prepare-ground requires jump.family = ground");
  const LindbladSpec spec =
      LindbladSpec::make(ComplexMatrix::Zero(H.dim(), H.dim()), build_ground_jumps(ctx, H.dense, eig, couplings, filter));
  const DensityMatrix target = DensityMatrix::pure(eig.eigenvectors.col(0));
  check_fixed_point(ctx, spec, target);
  const DensityMatrix rho0 = initial_state(cfg["evolve"]["initial"], eig, H.dim(), cfg["seed"].get<std::uint64_t>(), nullptr);
  evolve_and_record(ctx, spec, rho0, target, H.dense);
  stationary_metrics(ctx, spec, target);
  ctx.metrics["ground_energy"] = eig.eigenvalues(0);
}

void run_prepare_gibbs(Context& ctx) {
  Json& cfg = ctx.config;
  Json& f = cfg["filter"];
  const HamiltonianSpec H = build_hamiltonian(cfg["model"]);
  const EigenDecomposition eig = eig_hermitian(H.dense);
  const double beta = f["beta"].get<double>();
  const std::string family = cfg["jump"]["family"];
  const auto couplings = build_couplings(cfg["jump"], H.geometry, H.dim());
  const double e_max = resolve_value(f, "e_max", H.norm_bound());
  std::vector<Jump> jumps;
  if (family == "gibbs_single") {
    if (f["kind"] != "thermal_single_jump") throw ConfigError("gibbs_single requires filter.kind = thermal_single_jump");
    const double sigma = resolve_value(f, "sigma_omega", default_thermal_sigma(beta));
    const FilterSpec filter = thermal_single_jump_filter(beta, sigma, e_max);
    for (const auto& a : couplings) jumps.push_back({filtered_jump(eig, a, filter.freq_profile), 1.0});
  } else if (family == "gibbs_family") {
    if (f["kind"] != "gibbs_gaussian") throw ConfigError("gibbs_family requires filter.kind = gibbs_gaussian");
    const double sigma = resolve_value(f, "sigma_omega", default_thermal_sigma(beta));
    const FilterSpec filter = gibbs_gaussian_filter(beta, sigma, e_max);
    const WeightRule rule = weight_rule_from_string(cfg["jump"]["weight_rule"]);
    const RealVector grid = gibbs_frequency_grid(e_max, beta, sigma, rule, cfg["jump"]["omega_points"].get<int>());
    for (const auto& a : couplings) {
      LindbladSpec part = gibbs_jump_family(H, a, beta, filter, grid, rule);
      for (auto& j : part.jumps) jumps.push_back(std::move(j));
    }
  } else {
    throw ConfigError("prepare-gibbs requires jump.family = gibbs_single or gibbs_family");
  }
  const DensityMatrix sigma = gibbs_state(H, beta);
  const CoherentSolution coherent = solve_coherent_term(eig, jumps, sigma);
  ctx.metrics["coherent_residual"] = coherent.residual;
  const LindbladSpec spec = LindbladSpec::make(coherent.G, std::move(jumps));
  check_fixed_point(ctx, spec, sigma);
  if (spec.dim() <= kSuperOperatorGuard) ctx.metrics["kms_residual"] = kms_residual(spec, sigma);
  const DensityMatrix rho0 = initial_state(cfg["evolve"]["initial"], eig, H.dim(), cfg["seed"].get<std::uint64_t>(), nullptr);
  evolve_and_record(ctx, spec, rho0, sigma, H.dense);
  stationary_metrics(ctx, spec, sigma);
}

void run_prepare_excited(Context& ctx) {
  Json& cfg = ctx.config;
  Json& jump = cfg["jump"];
  Json& f = cfg["filter"];
  const HamiltonianSpec H = build_hamiltonian(cfg["model"]);
  const EigenDecomposition eig = eig_hermitian(H.dense);
  const Index d = H.dim();
  if (d < 3) throw ConfigError("prepare-excited needs at least three eigenstates");
  const auto couplings = build_couplings(jump, H.geometry, d);
  const RealVector& lam = eig.eigenvalues;
  std::vector<Jump> jumps;
  ComplexVector target;
  ComplexMatrix projector = ComplexMatrix::Identity(d, d);
  if (jump["family"] == "excited_projected") {
    const double gap01 = lam(1) - lam(0);
    const double mu = resolve_value(jump, "mu", lam(0) + 0.25 * gap01);
    const double window = resolve_value(jump, "delta", 0.5 * gap01);
    Index t = 0;
    while (t < d && lam(t) < mu + window) ++t;
    if (t >= d) throw ConfigError("no eigenvalue above mu + delta");
    const double gap_above = t + 1 < d ? lam(t + 1) - lam(t) : gap01;
    const FilterSpec ground = configured_ground_filter(f, 0.9 * gap_above, H.norm_bound());
    const FilterSpec proj = projector_filter(mu, window, H.norm_bound());
    for (const auto& a : couplings) {
      ExcitedProjected r = excited_jump_projected(H, mu, window, a, ground, proj);
      jumps.push_back({std::move(r.K), 1.0});
      projector = r.projector;
      target = r.target;
      ctx.metrics["target_energy"] = r.target_energy;
    }
  } else if (jump["family"] == "excited_squared") {
    const double mu = resolve_value(jump, "mu", lam(1));
    const EigenDecomposition sq = squared_spectrum(eig, mu);
    const FilterSpec ground = configured_ground_filter(f, 0.9 * exact_gap(sq), sq.eigenvalues(d - 1));
    for (const auto& a : couplings) {
      ExcitedSquared r = excited_jump_squared(H, mu, a, ground);
      jumps.push_back({std::move(r.K), 1.0});
      target = r.target;
      ctx.metrics["target_energy"] = r.target_energy;
    }
  } else {
    throw ConfigError("prepare-excited requires jump.family = excited_projected or excited_squared");
  }
  const LindbladSpec spec = LindbladSpec::make(ComplexMatrix::Zero(d, d), std::move(jumps));
  const DensityMatrix target_state = DensityMatrix::pure(target);
  check_fixed_point(ctx, spec, target_state);
  const DensityMatrix rho0 = initial_state(cfg["evolve"]["initial"], eig, d, cfg["seed"].get<std::uint64_t>(), &projector);
  evolve_and_record(ctx, spec, rho0, target_state, H.dense);
}

ComplexMatrix build_matrix(const Json& m) {
  if (m["model"] != "random_matrix") throw ConfigError("this scenario requires model = random_matrix");
  return random_matrix(m["rows"].get<int>(), m["cols"].get<int>(), m["seed"].get<std::uint64_t>());
}

void run_prepare_singular(Context& ctx) {
  Json& cfg = ctx.config;
  if (cfg["jump"]["family"] != "singular") throw ConfigError("prepare-singular requires jump.family = singular");
  const ComplexMatrix T = build_matrix(cfg["model"]);
  const ComplexMatrix gram = hermitian_part(T.adjoint() * T);
  const EigenDecomposition eig = eig_hermitian(gram);
  const Index d = gram.rows();
  const HamiltonianSpec H = from_dense(gram);
  const FilterSpec filter = configured_ground_filter(cfg["filter"], *H.gap_hint, eig.eigenvalues(d - 1));
  const auto couplings = build_couplings(cfg["jump"], H.geometry, d);
  const BuildMethod method =
      cfg["jump"]["method"] == "quadrature" ? BuildMethod::quadrature : BuildMethod::eigenbasis;
  std::vector<Jump> jumps;
  double leak = 0.0;
  for (const auto& a : couplings) {
    SingularJump r = singular_jump(T, a, filter, method);
    leak = std::max(leak, r.report.annihilation_residual);
    jumps.push_back({std::move(r.K), 1.0});
  }
  ctx.metrics["annihilation_residual"] = leak;
  const LindbladSpec spec = LindbladSpec::make(ComplexMatrix::Zero(d, d), std::move(jumps));
  const SVDResult s = svd(T);
  const ComplexVector v = s.right_vectors.col(s.right_vectors.cols() - 1);
  const DensityMatrix target = DensityMatrix::pure(v);
  check_fixed_point(ctx, spec, target);
  ctx.metrics["smallest_singular_value"] = s.singular_values(s.singular_values.size() - 1);
  const DensityMatrix rho0 = initial_state(cfg["evolve"]["initial"], eig, d, cfg["seed"].get<std::uint64_t>(), nullptr);
  evolve_and_record(ctx, spec, rho0, target, gram);
  stationary_metrics(ctx, spec, target);
}

void run_prepare_nonnormal(Context& ctx) {
  Json& cfg = ctx.config;
  if (cfg["jump"]["family"] != "nonnormal") throw ConfigError("prepare-nonnormal requires jump.family = nonnormal");
  const ComplexMatrix A = build_matrix(cfg["model"]);
  if (A.rows() != A.cols()) throw ConfigError("prepare-nonnormal requires a square matrix");
  const Index d = A.rows();
  Json& g = cfg["jump"]["lambda_grid"];
  const double norm = operator_norm(A);
  double half = resolve_value(g, "half_width", norm);
  const int points = g["points"].get<int>();
  const int refinements = g["refinements"].get<int>();
  if (points < 2 || refinements < 0 || !(half > 0.0)) throw ConfigError("invalid jump.lambda_grid");
  Complex center(g["center_re"].get<double>(), g["center_im"].get<double>());
  const auto couplings = build_couplings(cfg["jump"], LatticeGeometry::chain(1, static_cast<int>(d)), d);

  CsvWriter csv(ctx.file("smin.csv"), {"round", "re", "im", "smin"});
  NonnormalSearch result;
  for (int round = 0; round <= refinements; ++round) {
    std::vector<Complex> grid;
    const double step = 2.0 * half / (points - 1);
    for (int a = 0; a < points; ++a) {
      for (int b = 0; b < points; ++b) {
        grid.emplace_back(center.real() - half + step * b, center.imag() - half + step * a);
      }
    }
    if (round < refinements) {
      double best = std::numeric_limits<double>::infinity();
      Complex arg = grid.front();
      for (const Complex& l : grid) {
        Eigen::BDCSVD<ComplexMatrix> s(A - l * ComplexMatrix::Identity(d, d));
        const double smin = s.singularValues()(d - 1);
        csv.row({static_cast<double>(round), l.real(), l.imag(), smin});
        if (smin < best) {
          best = smin;
          arg = l;
        }
      }
      center = arg;
      half = step;
    } else {
      result = nonnormal_eigvec_search(A, grid, couplings);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        csv.row({static_cast<double>(round), grid[k].real(), grid[k].imag(), result.smin_curve[k]});
      }
    }
  }
  ctx.metrics["best_lambda_re"] = result.best_lambda.real();
  ctx.metrics["best_lambda_im"] = result.best_lambda.imag();
  ctx.metrics["eigen_residual"] = result.residual;
  ctx.metrics["relative_residual"] = result.residual / norm;
  ctx.metrics["prepared_fidelity"] = result.prepared_fidelity;
  ctx.metrics["ambiguous_minimum"] = result.ambiguous;
}

double student_t975(int dof) {
  static const double table[] = {0.0,   12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                                 2.306, 2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131};
  return dof < 16 ? table[dof] : 1.96;
}

void run_mixing_scan(Context& ctx) {
  Json& cfg = ctx.config;
  const Json& m = cfg["model"];
  if (m["model"] != "tfim") throw ConfigError("mixing-scan requires model = tfim");
  const Json& probes = cfg["probes"];
  MixingOptions options;
  options.random_probes = probes["R"].get<int>();
  options.seed = probes["seed"].get<std::uint64_t>();
  options.coarse_step = probes["coarse_step"].get<double>();
  const double eta = probes["eta"].get<double>();

  CsvWriter csv(ctx.file("mixing.csv"), {"n", "tau_mix", "gap"});
  std::vector<double> log_n, log_tau, taus;
  Json per_n = Json::array();
  for (const auto& nj : cfg["n_list"]) {
    const int n = nj.get<int>();
    if (n < 1 || (Index{1} << n) > kSuperOperatorGuard) {
      ctx.warnings.push_back("n = " + std::to_string(n) + " skipped: beyond the dimension guard");
      continue;
    }
    const HamiltonianSpec H = tfim_chain(n, m["g"].get<double>(), m["J"].get<double>());
    const EigenDecomposition eig = eig_hermitian(H.dense);
    Json f = cfg["filter"];
    const FilterSpec filter = configured_ground_filter(f, *H.gap_hint, H.norm_bound());
    const auto couplings = build_couplings(cfg["jump"], H.geometry, H.dim());
    const LindbladSpec spec = LindbladSpec::make(ComplexMatrix::Zero(H.dim(), H.dim()),
                                                 build_ground_jumps(ctx, H.dense, eig, couplings, filter));
    options.extra_probes = {{"top eigenstate", DensityMatrix::pure(eig.eigenvectors.col(H.dim() - 1))}};
    const MixingReport rep = mixing_time(spec, DensityMatrix::pure(eig.eigenvectors.col(0)), eta, options);
    for (const auto& w : rep.warnings) ctx.warnings.push_back("n = " + std::to_string(n) + ": " + w);
    csv.row({static_cast<double>(n), rep.tau_mix, rep.spectral_gap});
    per_n.push_back({{"n", n}, {"tau_mix", json_number(rep.tau_mix)}, {"gap", json_number(rep.spectral_gap)},
                     {"probes", rep.probe_description}});
    taus.push_back(rep.tau_mix);
    if (rep.tau_mix > 0.0 && std::isfinite(rep.tau_mix)) {
      log_n.push_back(std::log(n));
      log_tau.push_back(std::log(rep.tau_mix));
    }
  }
  bool monotone = true;
  for (std::size_t k = 1; k < taus.size(); ++k) monotone = monotone && taus[k] >= taus[k - 1];
  ctx.metrics["per_n"] = per_n;
  ctx.metrics["monotone_nondecreasing"] = monotone;
  ctx.metrics["mixing_time_is_lower_bound"] = true;
  if (log_n.size() >= 2) {
    const LineFit fit = fit_line(log_n, log_tau);
    Json jf = {{"exponent", fit.slope}, {"prefactor", std::exp(fit.intercept)}, {"r_squared", fit.r_squared}};
    if (log_n.size() >= 3) {
      double sxx = 0.0, ss = 0.0, mx = 0.0;
      for (double x : log_n) mx += x;
      mx /= static_cast<double>(log_n.size());
      for (std::size_t k = 0; k < log_n.size(); ++k) {
        sxx += (log_n[k] - mx) * (log_n[k] - mx);
        const double r = log_tau[k] - fit.intercept - fit.slope * log_n[k];
        ss += r * r;
      }
      const int dof = static_cast<int>(log_n.size()) - 2;
      const double se = std::sqrt(ss / dof / sxx);
      const double half = student_t975(dof) * se;
      jf["ci95"] = Json::array({fit.slope - half, fit.slope + half});
    }
    ctx.metrics["power_law_fit"] = jf;
  } else {
    ctx.metrics["power_law_fit"] = nullptr;
    ctx.warnings.push_back("power-law fit suppressed: fewer than two usable points");
  }
}

void run_quasilocality(Context& ctx) {
  Json& cfg = ctx.config;
  const HamiltonianSpec H = build_hamiltonian(cfg["model"]);
  const EigenDecomposition eig = eig_hermitian(H.dense);
  const int n = H.geometry.n_sites;
  if (cfg["site"].is_null()) cfg["site"] = (n - 1) / 2;
  const int site = cfg["site"].get<int>();
  if (site < 0 || site >= n) throw ConfigError("site out of range");
  Json& jump = cfg["jump"];
  if (jump["coupling"] == "default") jump["coupling"] = Json::array({"X" + std::to_string(site)});
  const auto couplings = build_couplings(jump, H.geometry, H.dim());
  if (couplings.size() != 1) throw ConfigError("quasilocality expects a single coupling operator");
  const FilterSpec filter = configured_ground_filter(cfg["filter"], *H.gap_hint, H.norm_bound());
  const JumpResult K = ground_jump_eigenbasis(H.dense, eig, couplings[0], filter);
  const ShellDecomposition dec = shell_decompose(K.K, H.geometry, site);

  std::optional<DecayFit> fit;
  try {
    fit = decay_fit(dec);
  } catch (const FitError& e) {
    ctx.warnings.push_back(e.what());
  }
  CsvWriter csv(ctx.file("shells.csv"), {"r", "norm", "fit"});
  int nonzero = 0;
  bool monotone = true;
  Json norms = Json::array();
  for (std::size_t k = 0; k < dec.shells.size(); ++k) {
    const Shell& s = dec.shells[k];
    const double model = fit ? fit->C * std::exp(-fit->mu_decay * s.r) : std::numeric_limits<double>::quiet_NaN();
    csv.row({static_cast<double>(s.r), s.norm, model});
    norms.push_back(s.norm);
    if (s.norm > kShellNoiseFloor) ++nonzero;
    if (k >= 2 && s.norm > dec.shells[k - 1].norm) monotone = false;
  }
  ctx.metrics["shell_norms"] = norms;
  ctx.metrics["nonzero_shells"] = nonzero;
  ctx.metrics["monotone_beyond_r1"] = monotone;
  ctx.metrics["reconstruction_error"] = dec.reconstruction_error;
  ctx.metrics["mu_decay"] = fit ? Json(fit->mu_decay) : Json(nullptr);
  ctx.metrics["decay_prefactor"] = fit ? Json(fit->C) : Json(nullptr);
}

void run_error_order(Context& ctx) {
  Json& cfg = ctx.config;
  const Json& m = cfg["model"];
  LindbladSpec spec;
  ComplexMatrix energy_op;
  EigenDecomposition eig;
  if (m["model"] == "amplitude_damping") {
    ComplexMatrix k = ComplexMatrix::Zero(2, 2);
    k(0, 1) = 1.0;
    spec = LindbladSpec::make(ComplexMatrix::Zero(2, 2), {{k, m["gamma"].get<double>()}});
    energy_op = ComplexMatrix::Zero(2, 2);
    energy_op(1, 1) = 1.0;
    eig = eig_hermitian(energy_op);
  } else {
    const HamiltonianSpec H = build_hamiltonian(m);
    eig = eig_hermitian(H.dense);
    const FilterSpec filter = configured_ground_filter(cfg["filter"], *H.gap_hint, H.norm_bound());
    const auto couplings = build_couplings(cfg["jump"], H.geometry, H.dim());
    spec = LindbladSpec::make(ComplexMatrix::Zero(H.dim(), H.dim()),
                              build_ground_jumps(ctx, H.dense, eig, couplings, filter));
    energy_op = H.dense;
  }
  std::vector<double> dts;
  for (const auto& v : cfg["dt_list"]) dts.push_back(v.get<double>());
  const DensityMatrix rho0 = initial_state(cfg["evolve"]["initial"], eig, spec.dim(), cfg["seed"].get<std::uint64_t>(), nullptr);
  const ErrorOrder order = channel_error_order(spec, rho0, dts, cfg["evolve"]["t_max"].get<double>());
  CsvWriter csv(ctx.file("order.csv"), {"dt", "single_step_err", "accumulated_err"});
  for (std::size_t k = 0; k < order.dts.size(); ++k) {
    csv.row({order.dts[k], order.single_step_errors[k], order.accumulated_errors[k]});
  }
  ctx.metrics["single_step_slope"] = order.single.slope;
  ctx.metrics["single_step_r2"] = order.single.r_squared;
  ctx.metrics["single_step_constant"] = std::exp(order.single.intercept);
  ctx.metrics["accumulated_slope"] = order.accumulated.slope;
  ctx.metrics["accumulated_r2"] = order.accumulated.r_squared;
  ctx.metrics["accumulated_constant"] = std::exp(order.accumulated.intercept);
}

Json csv_schemas() {
  return {{"evolution.csv", {"t", "distance", "fidelity", "energy", "trace_drift"}},
          {"mixing.csv", {"n", "tau_mix", "gap"}},
          {"shells.csv", {"r", "norm", "fit"}},
          {"order.csv", {"dt", "single_step_err", "accumulated_err"}},
          {"smin.csv", {"round", "re", "im", "smin"}}};
}

}  // namespace

std::vector<std::pair<std::string, std::string>> list() { return kScenarios; }

Json resolve(const Json& raw) {
  if (!raw.is_object()) config_error("config must be a JSON object");
  reject_unknown(raw, {"scenario", "model", "filter", "jump", "evolve", "probes", "checks", "output", "seed",
                       "n_list", "dt_list", "site"},
                 "config");
  if (!raw.contains("scenario") || !raw.at("scenario").is_string()) config_error("missing string key 'scenario'");
  const std::string scenario = raw.at("scenario");
  bool known = false;
  for (const auto& [name, desc] : kScenarios) known = known || name == scenario;
  if (!known) config_error("unknown scenario '" + scenario + "'");

  Json out = Json::object();
  out["scenario"] = scenario;
  out["model"] = resolve_model(raw, scenario);
  out["filter"] = resolve_filter(raw, scenario);
  out["jump"] = resolve_jump(raw, scenario);
  out["evolve"] = resolve_evolve(raw, scenario);
  out["probes"] = resolve_probes(raw, scenario);
  out["checks"] = resolve_checks(raw);
  take(out, raw, "output", "dissiprep_out", "config");
  take(out, raw, "seed", 0, "config");
  take(out, raw, "n_list", Json::array({2, 3, 4, 5}), "config");
  for (const auto& v : out["n_list"]) {
    if (!v.is_number_integer()) config_error("n_list entries must be integers");
  }
  Json dts = Json::array();
  for (int k = 4; k <= 10; ++k) dts.push_back(std::ldexp(1.0, -k));
  take(out, raw, "dt_list", dts, "config");
  for (const auto& v : out["dt_list"]) {
    if (!v.is_number()) config_error("dt_list entries must be numbers");
  }
  if (raw.contains("site") && !raw.at("site").is_null() && !raw.at("site").is_number_integer()) {
    config_error("site must be an integer");
  }
  out["site"] = raw.value("site", Json(nullptr));
  return out;
}

RunResult run(const Json& resolved) {
  RunResult result;
  Context ctx;
  ctx.config = resolved;
  const char* env = std::getenv("DISSIPREP_OUTPUT_DIR");
  ctx.dir = env && *env ? std::filesystem::path(env) : std::filesystem::path(resolved["output"].get<std::string>());
  ctx.fixed_point_tolerance = resolved["checks"]["fixed_point_tolerance"].get<double>();
  ctx.trace_drift_tolerance = resolved["checks"]["trace_drift_tolerance"].get<double>();
  result.output_dir = ctx.dir;
  std::filesystem::create_directories(ctx.dir);

  const auto start = std::chrono::steady_clock::now();
  std::string status = "ok";
  try {
    const std::string scenario = resolved["scenario"];
    if (scenario == "prepare-ground") run_prepare_ground(ctx);
    else if (scenario == "prepare-gibbs") run_prepare_gibbs(ctx);
    else if (scenario == "prepare-excited") run_prepare_excited(ctx);
    else if (scenario == "prepare-singular") run_prepare_singular(ctx);
    else if (scenario == "prepare-nonnormal") run_prepare_nonnormal(ctx);
    else if (scenario == "mixing-scan") run_mixing_scan(ctx);
    else if (scenario == "quasilocality") run_quasilocality(ctx);
    else run_error_order(ctx);
  } catch (const InvariantViolation& e) {
    status = "invariant_violation";
    result.exit_code = kExitInvariant;
    result.message = e.what();
  } catch (const NoFixedPointError& e) {
    status = "invariant_violation";
    result.exit_code = kExitInvariant;
    result.message = e.what();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json manifest = Json::object();
  manifest["schema_version"] = kSchemaVersion;
  manifest["library_version"] = DISSIPREP_VERSION;
  manifest["scenario"] = ctx.config["scenario"];
  manifest["status"] = status;
  if (!result.message.empty()) manifest["message"] = result.message;
  manifest["config"] = ctx.config;
  manifest["seeds"] = {{"seed", ctx.config["seed"]},
                       {"probe_seed", ctx.config["probes"]["seed"]},
                       {"coupling_seed", ctx.config["jump"]["coupling_seed"]}};
  manifest["wall_time_seconds"] = wall;
  manifest["metrics"] = ctx.metrics;
  manifest["warnings"] = ctx.warnings;
  ctx.files.push_back("manifest.json");
  manifest["files"] = ctx.files;
  manifest["csv_schemas"] = csv_schemas();
  std::ofstream(ctx.dir / "manifest.json") << manifest.dump(2) << '\n';
  result.manifest = std::move(manifest);
  return result;
}

RunResult run_file(const std::filesystem::path& path) {
  RunResult result;
  Json resolved;
  try {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    Json raw;
    try {
      raw = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    resolved = resolve(raw);
  } catch (const ConfigError& e) {
    result.exit_code = kExitValidation;
    result.message = e.what();
    return result;
  }
  try {
    return run(resolved);
  } catch (const ConfigError& e) {
    result.message = e.what();
  } catch (const ParameterError& e) {
    result.message = e.what();
  } catch (const DimensionError& e) {
    result.message = e.what();
  } catch (const DomainError& e) {
    result.message = e.what();
  } catch (const ResolutionError& e) {
    result.message = e.what();
  }
  result.exit_code = kExitValidation;
  return result;
}

}  // namespace dissiprep::scenarios
