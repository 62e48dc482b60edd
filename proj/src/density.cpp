// density.cpp — implementation of the density-operator dynamics.
#include "lvn/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lvn {

namespace {

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

constexpr double kHardTraceLimit = 1e-6;

[[noreturn]] void trace_abort(double defect, double t, int step) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific
     << "integrate_lvn: trace drift " << defect << " exceeds hard limit "
     << kHardTraceLimit << " at t = " << t << " (step " << step
     << "); the step size is too large for the guard limits";
  throw NumericGuardError(os.str());
}

[[noreturn]] void finite_abort(double t, int step) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific
     << "integrate_lvn: non-finite density entries at t = " << t << " (step "
     << step << "); the step size is too large for the guard limits";
  throw NumericGuardError(os.str());
}

}  // namespace

complexd TwoLevelParams::coupling_at(double t) const {
  if (coupling.size() != static_cast<size_t>(grid.n_samples()))
    throw std::invalid_argument(
        "TwoLevelParams: coupling sample count does not match grid");
  // Clamped linear interpolation between grid samples.
  const double s = (t - grid.t0) / grid.dt;
  if (s <= 0.0) return coupling.front();
  if (s >= grid.n_steps) return coupling.back();
  const int k = static_cast<int>(s);
  const double w = s - k;
  return (1.0 - w) * coupling[k] + w * coupling[k + 1];
}

Matrix TwoLevelParams::hamiltonian(double t) const {
  const complexd v = coupling_at(t);
  Matrix h(2, 2);
  h << complexd(omega_a, 0.0), v, std::conj(v), complexd(omega_b, 0.0);
  return h;
}

double DensityPath::max_trace_defect() const {
  return trace_defect.empty()
             ? 0.0
             : *std::max_element(trace_defect.begin(), trace_defect.end());
}

double DensityPath::max_herm_defect() const {
  return herm_defect.empty()
             ? 0.0
             : *std::max_element(herm_defect.begin(), herm_defect.end());
}

double DensityPath::purity_drift() const {
  double drift = 0.0;
  for (double p : purity) drift = std::max(drift, std::abs(p - purity.front()));
  return drift;
}

void require_density(const Matrix& rho, double tol, const std::string& who) {
  if (rho.rows() != rho.cols() || rho.rows() < 1)
    throw std::invalid_argument(who + ": density matrix must be square");
  require_hermitian(rho, tol, who);
  const double trace_defect = std::abs(rho.trace() - complexd(1.0, 0.0));
  if (trace_defect > tol)
    throw NumericGuardError(who + ": trace defect " + sci(trace_defect) +
                            " exceeds tol " + sci(tol));
  const EighResult es = eigh(rho, tol);
  if (es.values.minCoeff() < -tol)
    throw NumericGuardError(who + ": negative eigenvalue " +
                            sci(es.values.minCoeff()));
  const double purity = (rho * rho).trace().real();
  const double dim = static_cast<double>(rho.rows());
  if (purity < 1.0 / dim - tol || purity > 1.0 + tol)
    throw NumericGuardError(who + ": purity " + sci(purity) +
                            " outside [1/dim, 1]");
}

Matrix density_from_state(const Vector& psi, double norm_tol) {
  const double norm = psi.norm();
  if (std::abs(norm - 1.0) > norm_tol)
    throw std::invalid_argument(
        "density_from_state: state not normalized (norm " +
        std::to_string(norm) + ")");
  return psi * psi.adjoint();
}

Matrix lvn_rhs(const Matrix& rho, const Matrix& h) {
  if (rho.rows() != h.rows() || rho.cols() != h.cols())
    throw std::invalid_argument("lvn_rhs: dimension mismatch");
  return complexd(0.0, -1.0) * commutator(h, rho);
}

TwoLevelDerivatives two_level_rhs(double rho_aa, double rho_bb, complexd rho_ab,
                                  double omega_a, double omega_b,
                                  complexd v_ab) {
  TwoLevelDerivatives d;
  // iV_ab ρ_ba + c.c. computed once so the population rates are exact
  // negatives of each other.
  const double exchange =
      2.0 * (complexd(0.0, 1.0) * v_ab * std::conj(rho_ab)).real();
  d.d_aa = -exchange;
  d.d_bb = exchange;
  d.d_ab = complexd(0.0, -(omega_a - omega_b)) * rho_ab +
           complexd(0.0, 1.0) * v_ab * (rho_aa - rho_bb);
  return d;
}

DensityPath integrate_lvn(const TwoLevelParams& params, const Matrix& rho0,
                          const TimeGrid& grid) {
  if (rho0.rows() != 2 || rho0.cols() != 2)
    throw std::invalid_argument("integrate_lvn: two-level path needs a 2x2 state");
  require_density(rho0, 1e-9, "integrate_lvn(rho0)");
  if (grid.n_steps < 1 || grid.dt <= 0.0)
    throw std::invalid_argument("integrate_lvn: invalid grid");

  double aa = rho0(0, 0).real();
  double bb = rho0(1, 1).real();
  complexd ab = rho0(0, 1);

  DensityPath path;
  path.grid = grid;
  path.samples.reserve(grid.n_samples());
  path.trace_defect.reserve(grid.n_samples());
  path.herm_defect.reserve(grid.n_samples());
  path.purity.reserve(grid.n_samples());

  const auto record = [&](double t, int step) {
    Matrix rho(2, 2);
    rho << complexd(aa, 0.0), ab, std::conj(ab), complexd(bb, 0.0);
    if (!std::isfinite(aa) || !std::isfinite(bb) || !std::isfinite(ab.real()) ||
        !std::isfinite(ab.imag()))
      finite_abort(t, step);
    const double tr = std::abs(aa + bb - 1.0);
    if (tr > kHardTraceLimit) trace_abort(tr, t, step);
    path.samples.push_back(rho);
    path.trace_defect.push_back(tr);
    path.herm_defect.push_back(0.0);  // structural in the component form
    path.purity.push_back(aa * aa + bb * bb + 2.0 * std::norm(ab));
  };

  record(grid.t0, 0);
  for (int k = 0; k < grid.n_steps; ++k) {
    const double t = grid.time(k);
    const double h = grid.dt;
    const auto f = [&](double tt, double y_aa, double y_bb, complexd y_ab) {
      return two_level_rhs(y_aa, y_bb, y_ab, params.omega_a, params.omega_b,
                           params.coupling_at(tt));
    };
    const TwoLevelDerivatives k1 = f(t, aa, bb, ab);
    const TwoLevelDerivatives k2 =
        f(t + 0.5 * h, aa + 0.5 * h * k1.d_aa, bb + 0.5 * h * k1.d_bb,
          ab + 0.5 * h * k1.d_ab);
    const TwoLevelDerivatives k3 =
        f(t + 0.5 * h, aa + 0.5 * h * k2.d_aa, bb + 0.5 * h * k2.d_bb,
          ab + 0.5 * h * k2.d_ab);
    const TwoLevelDerivatives k4 =
        f(t + h, aa + h * k3.d_aa, bb + h * k3.d_bb, ab + h * k3.d_ab);
    aa += h / 6.0 * (k1.d_aa + 2.0 * k2.d_aa + 2.0 * k3.d_aa + k4.d_aa);
    bb += h / 6.0 * (k1.d_bb + 2.0 * k2.d_bb + 2.0 * k3.d_bb + k4.d_bb);
    ab += h / 6.0 * (k1.d_ab + 2.0 * k2.d_ab + 2.0 * k3.d_ab + k4.d_ab);
    record(grid.time(k + 1), k + 1);
  }
  return path;
}

DensityPath integrate_lvn(const OperatorPath& h_path, const Matrix& rho0) {
  if (h_path.samples.size() != static_cast<size_t>(h_path.grid.n_samples()))
    throw std::invalid_argument("integrate_lvn: sample count does not match grid");
  if (rho0.rows() != h_path.dim())
    throw std::invalid_argument("integrate_lvn: dimension mismatch");
  require_density(rho0, 1e-9, "integrate_lvn(rho0)");

  const TimeGrid& grid = h_path.grid;
  Matrix rho = rho0;

  DensityPath path;
  path.grid = grid;
  path.samples.reserve(grid.n_samples());
  path.trace_defect.reserve(grid.n_samples());
  path.herm_defect.reserve(grid.n_samples());
  path.purity.reserve(grid.n_samples());

  const auto record = [&](double t, int step) {
    if (!rho.allFinite()) finite_abort(t, step);
    const double tr = std::abs(rho.trace() - complexd(1.0, 0.0));
    if (tr > kHardTraceLimit) trace_abort(tr, t, step);
    path.samples.push_back(rho);
    path.trace_defect.push_back(tr);
    path.herm_defect.push_back(hermiticity_defect(rho));
    path.purity.push_back((rho * rho).trace().real());
  };

  record(grid.t0, 0);
  for (int k = 0; k < grid.n_steps; ++k) {
    const double h = grid.dt;
    const Matrix& h0 = h_path.samples[k];
    const Matrix h_mid = 0.5 * (h_path.samples[k] + h_path.samples[k + 1]);
    const Matrix& h1 = h_path.samples[k + 1];
    const Matrix k1 = lvn_rhs(rho, h0);
    const Matrix k2 = lvn_rhs(rho + 0.5 * h * k1, h_mid);
    const Matrix k3 = lvn_rhs(rho + 0.5 * h * k2, h_mid);
    const Matrix k4 = lvn_rhs(rho + h * k3, h1);
    rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    record(grid.time(k + 1), k + 1);
  }
  return path;
}

Observables observables(const Matrix& rho, double real_tol) {
  if (rho.rows() != rho.cols() || rho.rows() < 2)
    throw std::invalid_argument("observables: need a square matrix, dim >= 2");
  const double imag_aa = std::abs(rho(0, 0).imag());
  const double imag_bb = std::abs(rho(1, 1).imag());
  if (imag_aa > real_tol || imag_bb > real_tol)
    throw NumericGuardError("observables: complex populations (|imag| " +
                            sci(std::max(imag_aa, imag_bb)) + ")");
  Observables obs;
  obs.rho_aa = rho(0, 0).real();
  obs.rho_bb = rho(1, 1).real();
  obs.re_coherence = rho(0, 1).real();
  obs.im_coherence = rho(0, 1).imag();
  obs.purity = (rho * rho).trace().real();
  obs.trace = rho.trace().real();
  return obs;
}

double cross_check(const DensityPath& dp, const std::vector<Vector>& states) {
  if (dp.samples.size() != states.size())
    throw std::invalid_argument("cross_check: grid mismatch");
  double dev = 0.0;
  for (size_t k = 0; k < states.size(); ++k)
    dev = std::max(dev, max_abs(dp.samples[k] - states[k] * states[k].adjoint()));
  return dev;
}

}  // namespace lvn
