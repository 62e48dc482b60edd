// scenario.cpp — config validation, the four scenario pipelines, and the
// CSV/JSON writers.
#include "lvn/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lvn/core.hpp"
#include "lvn/density.hpp"
#include "lvn/invariant.hpp"
#include "lvn/susy.hpp"

namespace lvn {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kKinds = "rabi, invariant, reduce, susy";

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> table = {
      {"rabi", {"kind", "exec", "omega_a", "omega_b", "rabi", "dt", "n_steps"}},
      {"invariant",
       {"kind", "exec", "omega0", "omega", "amplitude", "t_final", "n_steps"}},
      {"reduce",
       {"kind", "exec", "omega0", "omega", "amplitude", "t_final", "n_steps"}},
      {"susy",
       {"kind", "exec", "superpotential", "coefficient", "x_min", "x_max",
        "n_points", "k_pairs", "hbar", "mass", "boundary",
        "expected_epsilon0"}},
  };
  return table;
}

[[noreturn]] void bad_key(const std::string& key, const std::string& what) {
  throw ConfigError("key \"" + key + "\" " + what);
}

double get_number(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) bad_key(key, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad_key(key, "must be finite");
  return x;
}

int get_int(const json& j, const std::string& key, int fallback, int lo,
            int hi) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) bad_key(key, "must be an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi)
    bad_key(key, "must be in [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "], got " + std::to_string(x));
  return static_cast<int>(x);
}

std::string get_choice(const json& j, const std::string& key,
                       const std::string& fallback,
                       const std::set<std::string>& choices) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) bad_key(key, "must be a string");
  const std::string s = v.get<std::string>();
  if (!choices.count(s)) {
    std::string list;
    for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
    bad_key(key, "must be one of {" + list + "}, got \"" + s + "\"");
  }
  return s;
}

void require_positive(double x, const std::string& key) {
  if (!(x > 0.0))
    bad_key(key, "must be positive, got " + std::to_string(x));
}

// --- report helpers ----------------------------------------------------------

// pass = value ≤ threshold (defect-style checks).
void check_leq(RunReport& rep, const std::string& name, double value,
               double threshold) {
  rep.checks.push_back({name, {value, threshold, value <= threshold}});
}

// pass = value ≥ threshold (fidelity/overlap/count-style checks).
void check_geq(RunReport& rep, const std::string& name, double value,
               double threshold) {
  rep.checks.push_back({name, {value, threshold, value >= threshold}});
}

// --- shared pipeline pieces ----------------------------------------------------

// Circularly driven two-level Hamiltonian used by the invariant and reduce
// scenarios.
std::function<Matrix(double)> driven_hamiltonian(double omega0, double omega,
                                                 double amplitude) {
  return [=](double t) {
    return Matrix(0.5 * omega0 * pauli_z() +
                  amplitude * (std::cos(omega * t) * pauli_x() +
                               std::sin(omega * t) * pauli_y()));
  };
}

double max_entry_distance(const std::vector<Matrix>& a,
                          const std::vector<Matrix>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    m = std::max(m, max_abs(a[k] - b[k]));
  return m;
}

double min_fidelity(const std::vector<Vector>& a,
                    const std::vector<Vector>& b) {
  double m = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    m = std::min(m, std::abs(a[k].dot(b[k])));
  return m;
}

Table phase_table(const PhaseRecord& phases) {
  Table t;
  t.filename = "phases.csv";
  t.header = "t,mode,phi_total,phi_dynamical,phi_geometric";
  const int n_modes = static_cast<int>(phases.total.size());
  for (int k = 0; k < phases.grid.n_samples(); ++k)
    for (int n = 0; n < n_modes; ++n)
      t.rows.push_back({phases.grid.time(k), static_cast<double>(n),
                        phases.total[n][k], phases.dynamical[n][k],
                        phases.geometric[n][k]});
  return t;
}

// --- rabi ----------------------------------------------------------------------

ScenarioOutput run_rabi(const ScenarioConfig& cfg) {
  ScenarioOutput out;
  out.report.kind = cfg.kind;

  TimeGrid grid{0.0, cfg.dt, cfg.n_steps};
  TwoLevelParams params;
  params.omega_a = cfg.omega_a;
  params.omega_b = cfg.omega_b;
  params.grid = grid;
  params.coupling.assign(grid.n_samples(), complexd(cfg.rabi, 0.0));

  Matrix rho0 = Matrix::Zero(2, 2);
  rho0(0, 0) = 1.0;

  // Three independent trajectories of the same physics: component RK4,
  // full-matrix RK4, and the unitary state propagator.
  const DensityPath comp = integrate_lvn(params, rho0, grid);
  const OperatorPath h_path =
      sample_path(grid, [&](double t) { return params.hamiltonian(t); });
  const DensityPath matp = integrate_lvn(h_path, rho0);
  Vector psi0(2);
  psi0 << 1.0, 0.0;
  const std::vector<Vector> direct = direct_schrodinger(h_path, psi0, cfg.exec);

  // Fourth leg: invariant-based assembly seeded with σ_x (an invariant of
  // the resonant Hamiltonian; off resonance the transported seed is used).
  const InvariantPath inv = propagate_invariant(h_path, pauli_x(), cfg.exec);
  const EigenframePath frames = track_eigenframe(inv, 1e-8, cfg.exec);
  const PhaseRecord phases = compute_phases(frames, h_path, 1e-6, cfg.exec);
  const Vector coeff = project_initial(psi0, frames.frames.front());
  const LRSolution lr = assemble_solution(coeff, phases, frames);

  RunReport& rep = out.report;
  if (cfg.omega_a == cfg.omega_b) {
    double dev = 0.0;
    for (int k = 0; k < grid.n_samples(); ++k) {
      const double c = std::cos(cfg.rabi * grid.time(k));
      dev = std::max(dev, std::abs(comp.samples[k](0, 0).real() - c * c));
    }
    check_leq(rep, "closed_form_dev", dev, 1e-6);
  }
  check_leq(rep, "trace_drift",
            std::max(comp.max_trace_defect(), matp.max_trace_defect()), 1e-10);
  check_leq(rep, "hermiticity_defect",
            std::max(comp.max_herm_defect(), matp.max_herm_defect()), 1e-10);
  check_leq(rep, "purity_drift",
            std::max(comp.purity_drift(), matp.purity_drift()), 1e-8);
  check_leq(rep, "component_vs_matrix",
            max_entry_distance(comp.samples, matp.samples), 1e-7);
  check_leq(rep, "density_vs_direct", cross_check(comp, direct), 1e-7);
  check_leq(rep, "density_vs_lr", cross_check(comp, lr.states), 1e-7);
  check_geq(rep, "lr_direct_fidelity", min_fidelity(direct, lr.states),
            1.0 - 1e-7);

  Table traces;
  traces.filename = "rabi_traces.csv";
  traces.header = "t,rho_aa,rho_bb,re_rho_ab,im_rho_ab,purity";
  for (int k = 0; k < grid.n_samples(); ++k) {
    const Observables o = observables(comp.samples[k]);
    traces.rows.push_back({grid.time(k), o.rho_aa, o.rho_bb, o.re_coherence,
                           o.im_coherence, o.purity});
  }
  out.tables.push_back(std::move(traces));
  return out;
}

// --- invariant -------------------------------------------------------------------

ScenarioOutput run_invariant(const ScenarioConfig& cfg) {
  ScenarioOutput out;
  out.report.kind = cfg.kind;

  const TimeGrid grid = make_grid(0.0, cfg.t_final, cfg.n_steps);
  const auto hfun = driven_hamiltonian(cfg.omega0, cfg.omega, cfg.amplitude);
  const OperatorPath h_path = sample_path(grid, hfun);

  const InvariantPath inv = propagate_invariant(h_path, pauli_z(), cfg.exec);

  // Same run at half the step size: the residual is expected to drop by
  // about the square of the refinement factor.
  const TimeGrid grid_half = make_grid(0.0, cfg.t_final, 2 * cfg.n_steps);
  const InvariantPath inv_half =
      propagate_invariant(sample_path(grid_half, hfun), pauli_z(), cfg.exec);
  const double ratio =
      inv.residual_max / std::max(inv_half.residual_max, 1e-300);

  const EigenframePath frames = track_eigenframe(inv, 1e-8, cfg.exec);
  const PhaseRecord phases = compute_phases(frames, h_path, 1e-6, cfg.exec);

  // Equal-weight seed state: populates both invariant modes.
  Vector psi0(2);
  const double r = 1.0 / std::numbers::sqrt2;
  psi0 << complexd(r, 0.0), complexd(r, 0.0);
  const Vector coeff = project_initial(psi0, frames.frames.front());
  const LRSolution lr = assemble_solution(coeff, phases, frames);
  const std::vector<Vector> direct = direct_schrodinger(h_path, psi0, cfg.exec);

  RunReport& rep = out.report;
  check_leq(rep, "residual", inv.residual_max, 1e-6);
  check_geq(rep, "halving_ratio", ratio, 3.5);
  check_leq(rep, "spectrum_spread", frames.spectrum_spread, 1e-10);
  check_geq(rep, "lr_fidelity", min_fidelity(direct, lr.states), 1.0 - 1e-8);
  check_geq(rep, "mode_continuity", frames.min_consecutive_overlap, 0.999);

  Table residuals;
  residuals.filename = "residuals.csv";
  residuals.header = "t,residual";
  for (int k = 0; k < grid.n_samples(); ++k)
    residuals.rows.push_back({grid.time(k), inv.residuals[k]});
  out.tables.push_back(std::move(residuals));
  out.tables.push_back(phase_table(phases));
  return out;
}

// --- reduce --------------------------------------------------------------------

ScenarioOutput run_reduce(const ScenarioConfig& cfg) {
  ScenarioOutput out;
  out.report.kind = cfg.kind;

  const TimeGrid grid = make_grid(0.0, cfg.t_final, cfg.n_steps);
  const auto hfun = driven_hamiltonian(cfg.omega0, cfg.omega, cfg.amplitude);
  const OperatorPath h_path = sample_path(grid, hfun);

  // Rotating frame that cancels the drive: V(t) = exp(−iωt σ_z/2). In this
  // frame the Hamiltonian is the constant (ω₀−ω)/2·σ_z + A·σ_x, which is
  // also the invariant seed, so I_V should sit still.
  const OperatorPath v_path = sample_path(grid, [&](double t) {
    Matrix v = Matrix::Zero(2, 2);
    v(0, 0) = std::exp(complexd(0.0, -0.5 * cfg.omega * t));
    v(1, 1) = std::exp(complexd(0.0, 0.5 * cfg.omega * t));
    return v;
  });
  const Matrix seed = 0.5 * (cfg.omega0 - cfg.omega) * pauli_z() +
                      cfg.amplitude * pauli_x();

  const InvariantPath inv = propagate_invariant(h_path, seed, cfg.exec);
  const ReductionResult red =
      unitary_reduce(v_path, inv.path, h_path, 1e-10, cfg.exec);

  // Phases are computed in the V frame: the eigenframe of I_V against H_V.
  InvariantPath iv_wrap;
  iv_wrap.path = red.i_v;
  const EigenframePath frames_v = track_eigenframe(iv_wrap, 1e-8, cfg.exec);
  const PhaseRecord phases_v = compute_phases(frames_v, red.h_v, 1e-6, cfg.exec);
  const ReducedDiagonalReport diag = check_reduced_diagonal(red, &phases_v);

  RunReport& rep = out.report;
  check_leq(rep, "iv_time_variation", red.iv_time_variation, 1e-8);
  check_leq(rep, "hv_offdiag", diag.offdiag_defect, 1e-8);
  check_leq(rep, "phase_match", diag.phase_match_defect, 1e-6);
  check_leq(rep, "hv_imag_defect", diag.imag_defect, 1e-8);
  check_leq(rep, "hv_hermiticity", red.hv_hermiticity, 1e-6);

  Table reduction;
  reduction.filename = "reduction.csv";
  reduction.header = "t,mode,d,d_integral";
  const int n_modes = static_cast<int>(diag.d.size());
  for (int k = 0; k < grid.n_samples(); ++k)
    for (int n = 0; n < n_modes; ++n)
      reduction.rows.push_back({grid.time(k), static_cast<double>(n),
                                diag.d[n][k], diag.d_integral[n][k]});
  out.tables.push_back(std::move(reduction));
  out.tables.push_back(phase_table(phases_v));
  return out;
}

// --- susy ----------------------------------------------------------------------

ScenarioOutput run_susy(const ScenarioConfig& cfg) {
  ScenarioOutput out;
  out.report.kind = cfg.kind;

  const SpatialGrid grid =
      make_spatial_grid(cfg.x_min, cfg.x_max, cfg.n_points);
  const PhysParams params{cfg.hbar, cfg.mass};
  const double c = cfg.coefficient;
  const SuperpotentialField field =
      cfg.superpotential == "linear"
          ? make_superpotential(
                grid, [c](double x) { return c * x; },
                [c](double) { return c; })
          : make_superpotential(
                grid, [c](double) { return c; }, [](double) { return 0.0; });
  const BoundaryPolicy policy = cfg.boundary == "decay"
                                    ? BoundaryPolicy::RequireDecay
                                    : BoundaryPolicy::FiniteBox;

  const GridWavefunction psi0 = ground_state_from_w(field, grid, params, policy);
  const auto [v_plus, v_minus] = partner_potentials(field, params);
  const auto [a, adag] = ladder_operators(field, grid, params);
  const auto [h_minus, h_plus] = partner_hamiltonians(a, adag);

  const double annihilation =
      a.apply(psi0.samples).norm() / psi0.samples.norm();
  const double ladder_comm =
      commutator_defect(a, adag, field.wprime, grid, params, cfg.exec);

  // Base potential V = W²; its ground energy ε₀ is what the matching
  // partner potential is shifted by.
  const Eigen::VectorXd v_base = field.w.cwiseProduct(field.w);
  const ShiftIdentityReport shift =
      shift_identity_check(v_base, field, grid, params, policy);
  const BandMatrix h = base_hamiltonian(v_base, grid, params);
  const InvarianceReport invr =
      invariance_check(h, h_minus, shift.epsilon0, grid, cfg.exec);
  const SpectrumReport spectrum =
      pairing_report(h_minus, h_plus, a, grid, cfg.k_pairs, cfg.exec);

  double pair_dev = 0.0;
  for (const PairRow& row : spectrum.pairs)
    pair_dev = std::max(pair_dev, row.deviation);

  RunReport& rep = out.report;
  check_leq(rep, "annihilation", annihilation, 1e-6);
  check_leq(rep, "ladder_commutator", ladder_comm, 1e-6);
  check_leq(rep, "shift_identity_dev", shift.matched_dev, 1e-4);
  if (cfg.expected_epsilon0)
    check_leq(rep, "epsilon0_dev",
              std::abs(shift.epsilon0 - *cfg.expected_epsilon0), 1e-4);
  check_geq(rep, "pairs_resolved", static_cast<double>(spectrum.k_pairs),
            static_cast<double>(cfg.k_pairs));
  check_leq(rep, "pair_deviation_max", pair_dev, 1e-3);
  check_leq(rep, "self_invariance", invr.self_commutator_rel, 1e-12);
  // The partner commutator and the stencil defect are grid artifacts that
  // vanish under refinement; at the reference spacing (dx = 0.01) both sit
  // near 1e-5, so 1e-4 flags regressions without chasing roundoff.
  check_leq(rep, "partner_invariance", invr.partner_commutator_rel, 1e-4);
  check_leq(rep, "discretization_defect", invr.discretization_defect, 1e-4);
  check_leq(rep, "intertwining", spectrum.intertwining_defect_max, 1e-6);
  check_leq(rep, "mapped_residual", spectrum.mapped_residual_max, 1e-3);

  Table spec_table;
  spec_table.filename = "spectrum.csv";
  spec_table.header = "n,E_minus,E_plus,pair_deviation";
  for (const PairRow& row : spectrum.pairs)
    spec_table.rows.push_back({static_cast<double>(row.n), row.e_minus,
                               row.e_plus, row.deviation});
  out.tables.push_back(std::move(spec_table));

  Table potentials;
  potentials.filename = "potentials.csv";
  potentials.header = "x,v_base,v_plus,v_minus,psi0";
  for (int j = 0; j < grid.n_points; ++j)
    potentials.rows.push_back(
        {grid.x(j), v_base[j], v_plus[j], v_minus[j], psi0.samples[j]});
  out.tables.push_back(std::move(potentials));
  return out;
}

}  // namespace

// --- public API ------------------------------------------------------------------

bool RunReport::all_pass() const {
  for (const auto& [name, check] : checks)
    if (!check.pass) return false;
  return true;
}

const CheckResult* RunReport::find(const std::string& name) const {
  for (const auto& [n, check] : checks)
    if (n == name) return &check;
  return nullptr;
}

ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {  // parse errors, number overflow
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("kind"))
    throw ConfigError("missing key \"kind\" (one of " + std::string(kKinds) +
                      ")");
  if (!j.at("kind").is_string()) bad_key("kind", "must be a string");

  ScenarioConfig cfg;
  cfg.kind = j.at("kind").get<std::string>();
  const auto& table = allowed_keys();
  const auto it = table.find(cfg.kind);
  if (it == table.end())
    throw ConfigError("unknown kind \"" + cfg.kind + "\"; valid kinds: " +
                      kKinds);
  for (const auto& [key, value] : j.items())
    if (!it->second.count(key))
      throw ConfigError("unknown key \"" + key + "\" for kind \"" + cfg.kind +
                        "\"");

  cfg.exec = get_choice(j, "exec", "parallel", {"serial", "parallel"}) ==
                     "serial"
                 ? ExecMode::Serial
                 : ExecMode::Parallel;

  if (cfg.kind == "rabi") {
    cfg.omega_a = get_number(j, "omega_a", 1.0);
    cfg.omega_b = get_number(j, "omega_b", 1.0);
    cfg.rabi = get_number(j, "rabi", 1.0);
    cfg.dt = get_number(j, "dt", 1e-3);
    require_positive(cfg.dt, "dt");
    cfg.n_steps = get_int(j, "n_steps", 6284, 2, 20000000);
  } else if (cfg.kind == "invariant" || cfg.kind == "reduce") {
    const bool red = cfg.kind == "reduce";
    cfg.omega0 = get_number(j, "omega0", red ? 1.3 : 0.4);
    cfg.omega = get_number(j, "omega", red ? 1.0 : 0.4);
    cfg.amplitude = get_number(j, "amplitude", red ? 0.4 : 0.2);
    cfg.t_final =
        get_number(j, "t_final", red ? 6.283185307179586 : 2.0);
    require_positive(cfg.t_final, "t_final");
    cfg.n_steps = get_int(j, "n_steps", red ? 48000 : 1000, 2, 20000000);
  } else {  // susy
    cfg.superpotential = get_choice(j, "superpotential", "linear",
                                    {"linear", "constant"});
    cfg.coefficient = get_number(j, "coefficient", 1.0);
    cfg.x_min = get_number(j, "x_min", -10.0);
    cfg.x_max = get_number(j, "x_max", 10.0);
    if (!(cfg.x_max > cfg.x_min))
      bad_key("x_max", "must exceed x_min");
    cfg.n_points = get_int(j, "n_points", 2001, 7, 6000);
    cfg.k_pairs = get_int(j, "k_pairs", 5, 1, 20);
    cfg.hbar = get_number(j, "hbar", 1.0);
    require_positive(cfg.hbar, "hbar");
    cfg.mass = get_number(j, "mass", 0.5);
    require_positive(cfg.mass, "mass");
    cfg.boundary =
        get_choice(j, "boundary", "decay", {"decay", "finite_box"});
    if (j.contains("expected_epsilon0"))
      cfg.expected_epsilon0 = get_number(j, "expected_epsilon0", 0.0);
  }
  return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ScenarioOutput run_scenario(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioOutput out;
  if (cfg.kind == "rabi")
    out = run_rabi(cfg);
  else if (cfg.kind == "invariant")
    out = run_invariant(cfg);
  else if (cfg.kind == "reduce")
    out = run_reduce(cfg);
  else if (cfg.kind == "susy")
    out = run_susy(cfg);
  else
    throw ConfigError("unknown kind \"" + cfg.kind + "\"; valid kinds: " +
                      kKinds);
  out.report.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

std::string format_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::vector<std::string> write_outputs(ScenarioOutput& out,
                                       const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory " + dir + ": " +
                             ec.message());

  std::vector<std::string> manifest;
  out.report.files.clear();
  for (const Table& table : out.tables) {
    const fs::path path = fs::path(dir) / table.filename;
    std::ofstream f(path, std::ios::binary);  // LF line endings everywhere
    if (!f) throw std::runtime_error("cannot open " + path.string());
    f << table.header << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) f << ',';
        f << format_cell(row[i]);
      }
      f << '\n';
    }
    if (!f.good()) throw std::runtime_error("write failed: " + path.string());
    out.report.files.push_back(table.filename);
    manifest.push_back(path.string());
  }

  ordered_json report;
  report["kind"] = out.report.kind;
  ordered_json checks = ordered_json::object();
  for (const auto& [name, check] : out.report.checks) {
    ordered_json entry;
    entry["value"] = check.value;
    entry["threshold"] = check.threshold;
    entry["pass"] = check.pass;
    checks[name] = entry;
  }
  report["checks"] = checks;
  report["files"] = out.report.files;
  report["duration_seconds"] = out.report.duration_seconds;

  const fs::path rpath = fs::path(dir) / "report.json";
  std::ofstream rf(rpath, std::ios::binary);
  if (!rf) throw std::runtime_error("cannot open " + rpath.string());
  rf << report.dump(2) << '\n';
  if (!rf.good()) throw std::runtime_error("write failed: " + rpath.string());
  manifest.push_back(rpath.string());
  return manifest;
}

}  // namespace lvn
