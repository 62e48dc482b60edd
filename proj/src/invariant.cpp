// invariant.cpp — implementation of the Lewis-Riesenfeld machinery.
#include "lvn/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lvn {

namespace {

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

// Non-throwing eigendecomposition for use inside parallel loops; failures
// are collected and raised after the loop (exceptions must not cross an
// OpenMP region).
bool eigh_nothrow(const Matrix& m, EighResult* out) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) return false;
  out->values = solver.eigenvalues();
  out->vectors = solver.eigenvectors();
  return true;
}

Matrix expm_unitary(const EighResult& es, double dt) {
  const int n = static_cast<int>(es.values.size());
  Vector phases(n);
  for (int i = 0; i < n; ++i)
    phases[i] = std::exp(complexd(0.0, -es.values[i] * dt));
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

// d/dt of a sampled path at sample k: centered differences on the interior,
// one-sided second-order stencils at the endpoints.
Matrix path_derivative(const std::vector<Matrix>& s, double dt, int k) {
  const int n = static_cast<int>(s.size());
  if (n == 2) return (s[1] - s[0]) / dt;
  if (k == 0) return (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * dt);
  if (k == n - 1)
    return (3.0 * s[n - 1] - 4.0 * s[n - 2] + s[n - 3]) / (2.0 * dt);
  return (s[k + 1] - s[k - 1]) / (2.0 * dt);
}

Vector col_derivative(const std::vector<Matrix>& frames, int col, double dt,
                      int k) {
  const int n = static_cast<int>(frames.size());
  if (n == 2) return (frames[1].col(col) - frames[0].col(col)) / dt;
  if (k == 0)
    return (-3.0 * frames[0].col(col) + 4.0 * frames[1].col(col) -
            frames[2].col(col)) /
           (2.0 * dt);
  if (k == n - 1)
    return (3.0 * frames[n - 1].col(col) - 4.0 * frames[n - 2].col(col) +
            frames[n - 3].col(col)) /
           (2.0 * dt);
  return (frames[k + 1].col(col) - frames[k - 1].col(col)) / (2.0 * dt);
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b,
                       const std::string& who) {
  if (a.n_steps != b.n_steps || a.dt != b.dt || a.t0 != b.t0)
    throw std::invalid_argument(who + ": paths sampled on different grids");
}

void require_path(const OperatorPath& p, const std::string& who) {
  if (p.samples.size() != static_cast<size_t>(p.grid.n_samples()))
    throw std::invalid_argument(who + ": sample count does not match grid");
  if (p.samples.empty() || p.grid.n_steps < 1)
    throw std::invalid_argument(who + ": empty path");
}

// Hermiticity guard over all samples; defect evaluation runs in parallel,
// the verdict is raised serially.
void require_hermitian_path(const OperatorPath& p, double tol, ExecMode mode,
                            const std::string& who) {
  const int n = static_cast<int>(p.samples.size());
  std::vector<double> defect(n);
  parallel_for(n, mode,
               [&](std::ptrdiff_t k) { defect[k] = hermiticity_defect(p.samples[k]); });
  for (int k = 0; k < n; ++k)
    if (defect[k] > tol)
      throw NumericGuardError(who + ": sample " + std::to_string(k) +
                              " not Hermitian (defect " + sci(defect[k]) +
                              ", tol " + sci(tol) + ")");
}

// Midpoint-exponential propagators for every interval of h_path.
std::vector<Matrix> interval_propagators(const OperatorPath& h_path,
                                         ExecMode mode,
                                         const std::string& who) {
  const int n = static_cast<int>(h_path.samples.size());
  std::vector<Matrix> props(n - 1);
  std::vector<char> ok(n - 1, 1);
  parallel_for(n - 1, mode, [&](std::ptrdiff_t k) {
    const Matrix mid = 0.5 * (h_path.samples[k] + h_path.samples[k + 1]);
    EighResult es;
    if (eigh_nothrow(mid, &es))
      props[k] = expm_unitary(es, h_path.grid.dt);
    else
      ok[k] = 0;
  });
  for (int k = 0; k < n - 1; ++k)
    if (!ok[k])
      throw NumericGuardError(who + ": eigendecomposition failed on interval " +
                              std::to_string(k));
  return props;
}

}  // namespace

InvariantPath propagate_invariant(const OperatorPath& h_path, const Matrix& i0,
                                  ExecMode mode, double herm_tol) {
  require_path(h_path, "propagate_invariant");
  if (i0.rows() != i0.cols() || i0.rows() != h_path.dim())
    throw std::invalid_argument("propagate_invariant: seed dimension mismatch");
  require_hermitian(i0, herm_tol, "propagate_invariant(seed)");
  require_hermitian_path(h_path, herm_tol, mode, "propagate_invariant");

  const int n = static_cast<int>(h_path.samples.size());
  const std::vector<Matrix> props =
      interval_propagators(h_path, mode, "propagate_invariant");

  // Ordered product is sequential by nature; the per-step propagators and
  // the similarity transforms are the parallel kernels.
  std::vector<Matrix> u(n);
  u[0] = Matrix::Identity(i0.rows(), i0.cols());
  for (int k = 0; k + 1 < n; ++k) u[k + 1] = props[k] * u[k];

  InvariantPath inv;
  inv.path.grid = h_path.grid;
  inv.path.samples.resize(n);
  parallel_for(n, mode, [&](std::ptrdiff_t k) {
    inv.path.samples[k] = u[k] * i0 * u[k].adjoint();
  });

  inv.residuals =
      invariant_residual(inv.path, h_path, mode, &inv.residual_max_entry);
  inv.residual_max =
      *std::max_element(inv.residuals.begin(), inv.residuals.end());
  return inv;
}

std::vector<double> invariant_residual(const OperatorPath& i_path,
                                       const OperatorPath& h_path,
                                       ExecMode mode, double* max_entry_out) {
  require_path(i_path, "invariant_residual");
  require_path(h_path, "invariant_residual");
  require_same_grid(i_path.grid, h_path.grid, "invariant_residual");
  if (i_path.dim() != h_path.dim())
    throw std::invalid_argument("invariant_residual: dimension mismatch");

  const int n = static_cast<int>(i_path.samples.size());
  const double dt = i_path.grid.dt;
  std::vector<double> res(n);
  std::vector<double> res_entry(n);
  parallel_for(n, mode, [&](std::ptrdiff_t k) {
    // dI/dt + (1/i)[I,H], with 1/i = −i.
    const Matrix r =
        path_derivative(i_path.samples, dt, static_cast<int>(k)) -
        complexd(0.0, 1.0) *
            commutator(i_path.samples[k], h_path.samples[k]);
    res[k] = frobenius(r);
    res_entry[k] = max_abs(r);
  });
  if (max_entry_out)
    *max_entry_out = *std::max_element(res_entry.begin(), res_entry.end());
  return res;
}

EigenframePath track_eigenframe(const InvariantPath& inv, double degeneracy_gap,
                                ExecMode mode) {
  require_path(inv.path, "track_eigenframe");
  const int n = static_cast<int>(inv.path.samples.size());
  const int dim = inv.path.dim();

  // Per-sample eigendecompositions are independent; matching and gauge
  // fixing chain sequentially below.
  std::vector<EighResult> es(n);
  std::vector<char> ok(n, 1);
  parallel_for(n, mode, [&](std::ptrdiff_t k) {
    ok[k] = eigh_nothrow(inv.path.samples[k], &es[k]) ? 1 : 0;
  });
  for (int k = 0; k < n; ++k) {
    if (!ok[k])
      throw NumericGuardError("track_eigenframe: eigendecomposition failed at step " +
                              std::to_string(k));
    const double gap = min_gap(es[k].values);
    if (gap < degeneracy_gap)
      throw NumericGuardError(
          "track_eigenframe: degenerate invariant spectrum at step " +
          std::to_string(k) + " (gap " + sci(gap) + " < " +
          sci(degeneracy_gap) + ")");
  }

  EigenframePath out;
  out.grid = inv.path.grid;
  out.eigenvalues = es[0].values;
  out.frames.resize(n);
  out.frames[0] = es[0].vectors;

  Eigen::VectorXd lo = es[0].values, hi = es[0].values;
  for (int k = 1; k < n; ++k) {
    const Matrix overlap = out.frames[k - 1].adjoint() * es[k].vectors;
    out.frames[k].resize(dim, dim);
    std::vector<char> used(dim, 0);
    for (int m = 0; m < dim; ++m) {
      int best = -1;
      double best_mag = -1.0;
      for (int j = 0; j < dim; ++j) {
        if (used[j]) continue;
        const double mag = std::abs(overlap(m, j));
        if (mag > best_mag) {
          best_mag = mag;
          best = j;
        }
      }
      if (best_mag * best_mag < 0.5)
        throw NumericGuardError(
            "track_eigenframe: overlap matrix far from a permutation at step " +
            std::to_string(k) + " (|overlap|^2 " + sci(best_mag * best_mag) +
            " < 0.5); reduce the time step");
      used[best] = 1;
      // Parallel-transport gauge: rotate the phase so the consecutive
      // overlap is real positive.
      const complexd phase = std::conj(overlap(m, best)) / best_mag;
      out.frames[k].col(m) = es[k].vectors.col(best) * phase;
      out.min_consecutive_overlap =
          std::min(out.min_consecutive_overlap, best_mag);
      const double lambda = es[k].values[best];
      lo[m] = std::min(lo[m], lambda);
      hi[m] = std::max(hi[m], lambda);
    }
  }
  out.spectrum_spread = (hi - lo).maxCoeff();
  return out;
}

PhaseRecord compute_phases(const EigenframePath& frame,
                           const OperatorPath& h_path, double realness_tol,
                           ExecMode mode) {
  require_path(h_path, "compute_phases");
  require_same_grid(frame.grid, h_path.grid, "compute_phases");
  if (frame.frames.empty() ||
      frame.frames.size() != static_cast<size_t>(frame.grid.n_samples()))
    throw std::invalid_argument("compute_phases: frame/grid mismatch");
  if (frame.frames[0].rows() != h_path.dim())
    throw std::invalid_argument("compute_phases: dimension mismatch");

  const int n = frame.grid.n_samples();
  const int n_modes = static_cast<int>(frame.frames[0].cols());
  const double dt = frame.grid.dt;

  PhaseRecord rec;
  rec.grid = frame.grid;
  rec.total.assign(n_modes, Eigen::VectorXd::Zero(n));
  rec.dynamical.assign(n_modes, Eigen::VectorXd::Zero(n));
  rec.geometric.assign(n_modes, Eigen::VectorXd::Zero(n));

  // Per-mode integrals are independent; each mode walks its own samples.
  std::vector<double> worst_imag(n_modes, 0.0);
  std::vector<Eigen::VectorXd> g_dyn(n_modes), g_geo(n_modes);
  parallel_for(n_modes, mode, [&](std::ptrdiff_t m) {
    g_dyn[m].resize(n);
    g_geo[m].resize(n);
    double imag_max = 0.0;
    for (int k = 0; k < n; ++k) {
      const Vector lam = frame.frames[k].col(m);
      const complexd dyn = lam.dot(h_path.samples[k] * lam);
      const complexd geo =
          complexd(0.0, -1.0) *
          lam.dot(col_derivative(frame.frames, static_cast<int>(m), dt, k));
      imag_max = std::max({imag_max, std::abs(dyn.imag()), std::abs(geo.imag())});
      g_dyn[m][k] = dyn.real();
      g_geo[m][k] = geo.real();
    }
    worst_imag[m] = imag_max;
  });
  for (int m = 0; m < n_modes; ++m)
    if (worst_imag[m] > realness_tol)
      throw NumericGuardError(
          "compute_phases: non-real phase integrand for mode " +
          std::to_string(m) + " (|imag| " + sci(worst_imag[m]) + " > " +
          sci(realness_tol) + "); gauge fixing looks broken");

  for (int m = 0; m < n_modes; ++m) {
    for (int k = 1; k < n; ++k) {
      rec.dynamical[m][k] =
          rec.dynamical[m][k - 1] + 0.5 * dt * (g_dyn[m][k - 1] + g_dyn[m][k]);
      rec.geometric[m][k] =
          rec.geometric[m][k - 1] + 0.5 * dt * (g_geo[m][k - 1] + g_geo[m][k]);
    }
    rec.total[m] = rec.dynamical[m] + rec.geometric[m];
  }
  return rec;
}

Vector project_initial(const Vector& psi0, const Matrix& frame_t0,
                       double norm_tol) {
  if (psi0.size() != frame_t0.rows())
    throw std::invalid_argument("project_initial: dimension mismatch");
  const double norm = psi0.norm();
  if (std::abs(norm - 1.0) > norm_tol)
    throw std::invalid_argument("project_initial: state not normalized (norm " +
                                std::to_string(norm) + ")");
  return frame_t0.adjoint() * psi0;
}

LRSolution assemble_solution(const Vector& c, const PhaseRecord& phases,
                             const EigenframePath& frame) {
  const int n_modes = static_cast<int>(c.size());
  if (frame.frames.empty() || frame.frames[0].cols() != n_modes ||
      static_cast<int>(phases.total.size()) != n_modes)
    throw std::invalid_argument("assemble_solution: mode count mismatch");
  require_same_grid(frame.grid, phases.grid, "assemble_solution");

  const int n = frame.grid.n_samples();
  LRSolution sol;
  sol.coefficients = c;
  sol.states.resize(n);
  for (int k = 0; k < n; ++k) {
    Vector w(n_modes);
    for (int m = 0; m < n_modes; ++m)
      w[m] = c[m] * std::exp(complexd(0.0, -phases.total[m][k]));
    sol.states[k] = frame.frames[k] * w;
  }
  return sol;
}

std::vector<Vector> direct_schrodinger(const OperatorPath& h_path,
                                       const Vector& psi0, ExecMode mode) {
  require_path(h_path, "direct_schrodinger");
  if (psi0.size() != h_path.dim())
    throw std::invalid_argument("direct_schrodinger: dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("direct_schrodinger: state not normalized");
  require_hermitian_path(h_path, 1e-10, mode, "direct_schrodinger");

  const int n = static_cast<int>(h_path.samples.size());
  const std::vector<Matrix> props =
      interval_propagators(h_path, mode, "direct_schrodinger");
  std::vector<Vector> states(n);
  states[0] = psi0;
  for (int k = 0; k + 1 < n; ++k) states[k + 1] = props[k] * states[k];
  return states;
}

ReductionResult unitary_reduce(const OperatorPath& v_path,
                               const OperatorPath& i_path,
                               const OperatorPath& h_path, double unitary_tol,
                               ExecMode mode) {
  require_path(v_path, "unitary_reduce");
  require_path(i_path, "unitary_reduce");
  require_path(h_path, "unitary_reduce");
  require_same_grid(v_path.grid, i_path.grid, "unitary_reduce");
  require_same_grid(v_path.grid, h_path.grid, "unitary_reduce");
  if (v_path.dim() != i_path.dim() || v_path.dim() != h_path.dim())
    throw std::invalid_argument("unitary_reduce: dimension mismatch");

  const int n = static_cast<int>(v_path.samples.size());
  std::vector<double> unit_defect(n);
  parallel_for(n, mode, [&](std::ptrdiff_t k) {
    unit_defect[k] = unitarity_defect(v_path.samples[k]);
  });
  for (int k = 0; k < n; ++k)
    if (unit_defect[k] > unitary_tol)
      throw NumericGuardError("unitary_reduce: V sample " + std::to_string(k) +
                              " not unitary (defect " + sci(unit_defect[k]) +
                              ", tol " + sci(unitary_tol) + ")");

  ReductionResult red;
  red.i_v.grid = v_path.grid;
  red.h_v.grid = v_path.grid;
  red.i_v.samples.resize(n);
  red.h_v.samples.resize(n);
  const double dt = v_path.grid.dt;
  parallel_for(n, mode, [&](std::ptrdiff_t k) {
    const Matrix& v = v_path.samples[k];
    const Matrix vdag = v.adjoint();
    red.i_v.samples[k] = vdag * i_path.samples[k] * v;
    const Matrix dv = path_derivative(v_path.samples, dt, static_cast<int>(k));
    red.h_v.samples[k] =
        vdag * h_path.samples[k] * v - complexd(0.0, 1.0) * (vdag * dv);
  });

  std::vector<double> drift(n), herm(n);
  parallel_for(n, mode, [&](std::ptrdiff_t k) {
    drift[k] = max_abs(red.i_v.samples[k] - red.i_v.samples[0]);
    herm[k] = hermiticity_defect(red.h_v.samples[k]);
  });
  red.iv_time_variation = *std::max_element(drift.begin(), drift.end());
  red.hv_hermiticity = *std::max_element(herm.begin(), herm.end());
  return red;
}

ReducedDiagonalReport check_reduced_diagonal(const ReductionResult& red,
                                             const PhaseRecord* phases) {
  require_path(red.i_v, "check_reduced_diagonal");
  require_path(red.h_v, "check_reduced_diagonal");
  const int n = static_cast<int>(red.h_v.samples.size());
  const int dim = red.i_v.dim();
  const double dt = red.i_v.grid.dt;

  // Basis from the (time-independent within tol) invariant at t0; H_V is
  // Hermitian only to discretization order, so the basis tolerance is loose.
  const EighResult basis = eigh(red.i_v.samples[0], 1e-8);

  ReducedDiagonalReport rep;
  rep.basis_values = basis.values;
  rep.d.assign(dim, Eigen::VectorXd::Zero(n));
  rep.d_integral.assign(dim, Eigen::VectorXd::Zero(n));
  for (int k = 0; k < n; ++k) {
    const Matrix m = basis.vectors.adjoint() * red.h_v.samples[k] * basis.vectors;
    for (int i = 0; i < dim; ++i) {
      rep.d[i][k] = m(i, i).real();
      rep.imag_defect = std::max(rep.imag_defect, std::abs(m(i, i).imag()));
      for (int j = 0; j < dim; ++j)
        if (i != j) rep.offdiag_defect = std::max(rep.offdiag_defect, std::abs(m(i, j)));
    }
  }
  for (int i = 0; i < dim; ++i)
    for (int k = 1; k < n; ++k)
      rep.d_integral[i][k] =
          rep.d_integral[i][k - 1] + 0.5 * dt * (rep.d[i][k - 1] + rep.d[i][k]);

  if (phases) {
    require_same_grid(red.i_v.grid, phases->grid, "check_reduced_diagonal");
    if (static_cast<int>(phases->total.size()) != dim)
      throw std::invalid_argument("check_reduced_diagonal: mode count mismatch");
    rep.phase_match_defect = 0.0;
    for (int i = 0; i < dim; ++i)
      rep.phase_match_defect =
          std::max(rep.phase_match_defect,
                   (rep.d_integral[i] - phases->total[i]).cwiseAbs().maxCoeff());
  }
  return rep;
}

}  // namespace lvn
