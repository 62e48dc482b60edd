// susy.cpp — implementation of the grid factorization machinery.
#include "lvn/susy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <lapacke.h>

namespace lvn {

namespace {

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

void require_params(const PhysParams& p, const std::string& who) {
  if (!(p.hbar > 0.0) || !(p.mass > 0.0))
    throw std::invalid_argument(who + ": hbar and mass must be positive");
}

void require_field(const SuperpotentialField& w, const SpatialGrid& grid,
                   const std::string& who) {
  if (w.w.size() != grid.n_points || w.wprime.size() != grid.n_points)
    throw std::invalid_argument(who + ": field sample count does not match grid");
}

// Lowest `count` box modes sin(mπ(x−x_min)/L), m = 1..count — smooth,
// deterministic probe vectors vanishing at the walls.
std::vector<Eigen::VectorXd> box_probes(const SpatialGrid& grid, int count) {
  const int n = grid.n_points;
  std::vector<Eigen::VectorXd> probes;
  probes.reserve(count);
  for (int m = 1; m <= count; ++m) {
    Eigen::VectorXd f(n);
    for (int j = 0; j < n; ++j)
      f[j] = std::sin(m * std::numbers::pi * j / (n - 1.0));
    probes.push_back(std::move(f));
  }
  return probes;
}

double interior_norm(const Eigen::VectorXd& v, int margin) {
  const int n = static_cast<int>(v.size());
  if (2 * margin >= n) return 0.0;
  return v.segment(margin, n - 2 * margin).norm();
}

// Fraction of the difference energy carried at the grid Nyquist scale:
// ~0 for smooth vectors, ~1 for checkerboard vectors.
double nyquist_fraction(const Eigen::VectorXd& v) {
  double diff2 = 0.0, sum2 = 0.0;
  for (int j = 0; j + 1 < v.size(); ++j) {
    const double d = v[j + 1] - v[j];
    const double s = v[j + 1] + v[j];
    diff2 += d * d;
    sum2 += s * s;
  }
  const double total = diff2 + sum2;
  return total > 0.0 ? diff2 / total : 0.0;
}

}  // namespace

double PhysParams::scale() const { return hbar / std::sqrt(2.0 * mass); }

SpatialGrid make_spatial_grid(double x_min, double x_max, int n_points) {
  if (!(std::isfinite(x_min) && std::isfinite(x_max)))
    throw std::invalid_argument("make_spatial_grid: bounds must be finite");
  if (!(x_max > x_min))
    throw std::invalid_argument("make_spatial_grid: x_max must exceed x_min");
  if (n_points < 3)
    throw std::invalid_argument("make_spatial_grid: n_points must be >= 3");
  return SpatialGrid{x_min, x_max, n_points};
}

SuperpotentialField make_superpotential(
    const SpatialGrid& grid, const std::function<double(double)>& w,
    const std::function<double(double)>& wprime) {
  const int n = grid.n_points;
  Eigen::VectorXd ws(n);
  for (int j = 0; j < n; ++j) ws[j] = w(grid.x(j));
  if (!wprime) return superpotential_from_samples(grid, std::move(ws));
  Eigen::VectorXd wp(n);
  for (int j = 0; j < n; ++j) wp[j] = wprime(grid.x(j));
  return superpotential_from_samples(grid, std::move(ws), &wp);
}

SuperpotentialField superpotential_from_samples(
    const SpatialGrid& grid, Eigen::VectorXd w_samples,
    const Eigen::VectorXd* wprime_samples) {
  const int n = grid.n_points;
  if (w_samples.size() != n)
    throw std::invalid_argument(
        "superpotential_from_samples: sample count does not match grid");
  if (!w_samples.allFinite())
    throw std::invalid_argument("superpotential_from_samples: non-finite W");
  SuperpotentialField field;
  field.w = std::move(w_samples);
  if (wprime_samples) {
    if (wprime_samples->size() != n || !wprime_samples->allFinite())
      throw std::invalid_argument("superpotential_from_samples: bad W' samples");
    field.wprime = *wprime_samples;
    return field;
  }
  // Centered differences, one-sided second order at the edges.
  const double dx = grid.dx();
  field.wprime.resize(n);
  field.wprime[0] =
      (-3.0 * field.w[0] + 4.0 * field.w[1] - field.w[2]) / (2.0 * dx);
  for (int j = 1; j + 1 < n; ++j)
    field.wprime[j] = (field.w[j + 1] - field.w[j - 1]) / (2.0 * dx);
  field.wprime[n - 1] =
      (3.0 * field.w[n - 1] - 4.0 * field.w[n - 2] + field.w[n - 3]) /
      (2.0 * dx);
  return field;
}

BandMatrix::BandMatrix(int n_, int kd_) : n(n_), kd(kd_) {
  if (n < 1 || kd < 0 || kd >= n)
    throw std::invalid_argument("BandMatrix: invalid shape");
  bands = Eigen::MatrixXd::Zero(2 * kd + 1, n);
}

BandMatrix BandMatrix::diagonal(const Eigen::VectorXd& d) {
  BandMatrix m(static_cast<int>(d.size()), 0);
  m.bands.row(0) = d.transpose();
  return m;
}

double& BandMatrix::at(int i, int j) {
  if (i < 0 || j < 0 || i >= n || j >= n || std::abs(i - j) > kd)
    throw std::out_of_range("BandMatrix::at: outside the band");
  return bands(kd + i - j, j);
}

double BandMatrix::entry(int i, int j) const {
  if (i < 0 || j < 0 || i >= n || j >= n || std::abs(i - j) > kd) return 0.0;
  return bands(kd + i - j, j);
}

Eigen::VectorXd BandMatrix::apply(const Eigen::VectorXd& x) const {
  if (x.size() != n)
    throw std::invalid_argument("BandMatrix::apply: dimension mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const int j0 = std::max(0, i - kd);
    const int j1 = std::min(n - 1, i + kd);
    double acc = 0.0;
    for (int j = j0; j <= j1; ++j) acc += bands(kd + i - j, j) * x[j];
    y[i] = acc;
  }
  return y;
}

BandMatrix BandMatrix::transpose() const {
  BandMatrix t(n, kd);
  for (int j = 0; j < n; ++j) {
    const int i0 = std::max(0, j - kd);
    const int i1 = std::min(n - 1, j + kd);
    for (int i = i0; i <= i1; ++i) t.bands(kd + j - i, i) = bands(kd + i - j, j);
  }
  return t;
}

double BandMatrix::max_abs() const {
  double m = 0.0;
  for (int j = 0; j < n; ++j) {
    const int i0 = std::max(0, j - kd);
    const int i1 = std::min(n - 1, j + kd);
    for (int i = i0; i <= i1; ++i)
      m = std::max(m, std::abs(bands(kd + i - j, j)));
  }
  return m;
}

double BandMatrix::asymmetry() const {
  double m = 0.0;
  for (int j = 0; j < n; ++j) {
    const int i0 = std::max(0, j - kd);
    const int i1 = std::min(n - 1, j + kd);
    for (int i = i0; i <= i1; ++i)
      m = std::max(m, std::abs(entry(i, j) - entry(j, i)));
  }
  return m;
}

BandMatrix band_add(const BandMatrix& a, const BandMatrix& b, double c_a,
                    double c_b) {
  if (a.n != b.n) throw std::invalid_argument("band_add: dimension mismatch");
  BandMatrix c(a.n, std::max(a.kd, b.kd));
  for (int j = 0; j < c.n; ++j) {
    const int i0 = std::max(0, j - c.kd);
    const int i1 = std::min(c.n - 1, j + c.kd);
    for (int i = i0; i <= i1; ++i)
      c.bands(c.kd + i - j, j) = c_a * a.entry(i, j) + c_b * b.entry(i, j);
  }
  return c;
}

BandMatrix band_multiply(const BandMatrix& a, const BandMatrix& b) {
  if (a.n != b.n)
    throw std::invalid_argument("band_multiply: dimension mismatch");
  BandMatrix c(a.n, std::min(a.n - 1, a.kd + b.kd));
  for (int j = 0; j < c.n; ++j) {
    const int i0 = std::max(0, j - c.kd);
    const int i1 = std::min(c.n - 1, j + c.kd);
    for (int i = i0; i <= i1; ++i) {
      const int m0 = std::max({0, i - a.kd, j - b.kd});
      const int m1 = std::min({c.n - 1, i + a.kd, j + b.kd});
      double acc = 0.0;
      for (int m = m0; m <= m1; ++m) acc += a.entry(i, m) * b.entry(m, j);
      c.bands(c.kd + i - j, j) = acc;
    }
  }
  return c;
}

double interior_max_abs(const BandMatrix& m, int margin) {
  double v = 0.0;
  for (int i = margin; i < m.n - margin; ++i) {
    const int j0 = std::max(0, i - m.kd);
    const int j1 = std::min(m.n - 1, i + m.kd);
    for (int j = j0; j <= j1; ++j) v = std::max(v, std::abs(m.entry(i, j)));
  }
  return v;
}

EigenpairsResult lowest_eigenpairs(const BandMatrix& m, int count) {
  const int n = m.n;
  if (count < 1 || count > n)
    throw std::invalid_argument("lowest_eigenpairs: bad count");
  const double asym = m.asymmetry();
  const double scale = std::max(1.0, m.max_abs());
  if (asym > 1e-10 * scale)
    throw NumericGuardError("lowest_eigenpairs: matrix not symmetric (defect " +
                            sci(asym) + ")");

  EigenpairsResult out;
  out.values.resize(count);
  out.vectors.resize(n, count);
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  lapack_int found = 0;

  if (m.kd <= 1) {
    // Tridiagonal: MRRR solver, no dense workspace.
    Eigen::VectorXd d(n), e(std::max(1, n - 1));
    for (int j = 0; j < n; ++j) d[j] = m.entry(j, j);
    for (int j = 0; j + 1 < n; ++j) e[j] = m.entry(j, j + 1);
    std::vector<lapack_int> isuppz(2 * std::max(1, count));
    const lapack_int info = LAPACKE_dstevr(
        LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, count,
        abstol, &found, out.values.data(), out.vectors.data(), n,
        isuppz.data());
    if (info != 0)
      throw NumericGuardError("lowest_eigenpairs: tridiagonal solver failed (info " +
                              std::to_string(info) + ")");
  } else {
    // General band: bisection + inverse iteration. Needs an n×n reduction
    // workspace, so keep grids moderate when many solves are required.
    const int kd = m.kd;
    const int ldab = kd + 1;
    Eigen::MatrixXd ab = Eigen::MatrixXd::Zero(ldab, n);
    for (int j = 0; j < n; ++j)
      for (int i = std::max(0, j - kd); i <= j; ++i)
        ab(kd + i - j, j) = m.entry(i, j);
    Eigen::MatrixXd q(n, n);
    std::vector<lapack_int> ifail(n);
    const lapack_int info = LAPACKE_dsbevx(
        LAPACK_COL_MAJOR, 'V', 'I', 'U', n, kd, ab.data(), ldab, q.data(), n,
        0.0, 0.0, 1, count, abstol, &found, out.values.data(),
        out.vectors.data(), n, ifail.data());
    if (info != 0)
      throw NumericGuardError("lowest_eigenpairs: band solver failed (info " +
                              std::to_string(info) + ")");
  }
  if (found < count)
    throw NumericGuardError("lowest_eigenpairs: solver returned " +
                            std::to_string(found) + " of " +
                            std::to_string(count) + " eigenpairs");
  return out;
}

GridWavefunction ground_state_from_w(const SuperpotentialField& w,
                                     const SpatialGrid& grid,
                                     const PhysParams& params,
                                     BoundaryPolicy policy) {
  require_params(params, "ground_state_from_w");
  require_field(w, grid, "ground_state_from_w");
  const int n = grid.n_points;
  const double dx = grid.dx();
  const double kappa = 1.0 / params.scale();  // √(2m)/ħ

  // Cumulative trapezoid of W from the left wall; shifting by the minimum
  // keeps the exponentials representable for steep superpotentials.
  Eigen::VectorXd phi(n);
  phi[0] = 0.0;
  for (int j = 1; j < n; ++j)
    phi[j] = phi[j - 1] + 0.5 * dx * (w.w[j - 1] + w.w[j]);
  const double shift = phi.minCoeff();

  GridWavefunction psi;
  psi.samples.resize(n);
  for (int j = 0; j < n; ++j)
    psi.samples[j] = std::exp(-kappa * (phi[j] - shift));

  double norm2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double weight = (j == 0 || j == n - 1) ? 0.5 : 1.0;
    norm2 += weight * psi.samples[j] * psi.samples[j] * dx;
  }
  if (!(norm2 > 0.0) || !std::isfinite(norm2))
    throw NumericGuardError("ground_state_from_w: norm not representable");
  psi.samples /= std::sqrt(norm2);

  const double peak = psi.samples.cwiseAbs().maxCoeff();
  const double edge = std::max(std::abs(psi.samples[0]),
                               std::abs(psi.samples[n - 1]));
  psi.decays = edge <= 1e-8 * peak;
  if (!psi.decays && policy == BoundaryPolicy::RequireDecay)
    throw NumericGuardError(
        "ground_state_from_w: state does not decay at the box edges "
        "(|psi|_edge/|psi|_max " +
        sci(edge / peak) +
        "); not normalizable on this grid — use the finite-box policy to "
        "accept it anyway");
  return psi;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> partner_potentials(
    const SuperpotentialField& w, const PhysParams& params) {
  require_params(params, "partner_potentials");
  if (w.w.size() != w.wprime.size())
    throw std::invalid_argument("partner_potentials: inconsistent field");
  const double s = params.scale();
  const Eigen::VectorXd w2 = w.w.cwiseProduct(w.w);
  return {w2 + s * w.wprime, w2 - s * w.wprime};
}

std::pair<BandMatrix, BandMatrix> ladder_operators(
    const SuperpotentialField& w, const SpatialGrid& grid,
    const PhysParams& params) {
  require_params(params, "ladder_operators");
  require_field(w, grid, "ladder_operators");
  const int n = grid.n_points;
  if (n < 7)
    throw std::invalid_argument("ladder_operators: grid too small for the stencil");
  const double s = params.scale();
  const double c1 = 8.0 / (12.0 * grid.dx());
  const double c2 = 1.0 / (12.0 * grid.dx());

  BandMatrix a(n, 2);
  for (int i = 0; i < n; ++i) {
    a.at(i, i) = w.w[i];
    if (i + 1 < n) a.at(i, i + 1) = s * c1;
    if (i - 1 >= 0) a.at(i, i - 1) = -s * c1;
    if (i + 2 < n) a.at(i, i + 2) = -s * c2;
    if (i - 2 >= 0) a.at(i, i - 2) = s * c2;
  }
  return {a, a.transpose()};
}

std::pair<BandMatrix, BandMatrix> partner_hamiltonians(const BandMatrix& a,
                                                       const BandMatrix& adag) {
  if (a.n != adag.n || a.kd != adag.kd)
    throw std::invalid_argument("partner_hamiltonians: operator mismatch");
  BandMatrix h_minus = band_multiply(adag, a);
  BandMatrix h_plus = band_multiply(a, adag);
  const double scale = std::max(1.0, std::max(h_minus.max_abs(), h_plus.max_abs()));
  if (h_minus.asymmetry() > 1e-12 * scale || h_plus.asymmetry() > 1e-12 * scale)
    throw NumericGuardError("partner_hamiltonians: products lost symmetry");
  return {h_minus, h_plus};
}

double commutator_defect(const BandMatrix& a, const BandMatrix& adag,
                         const Eigen::VectorXd& wprime,
                         const SpatialGrid& grid, const PhysParams& params,
                         ExecMode mode) {
  require_params(params, "commutator_defect");
  if (wprime.size() != grid.n_points || a.n != grid.n_points)
    throw std::invalid_argument("commutator_defect: dimension mismatch");
  const double two_s = 2.0 * params.scale();
  const int margin = 2;
  const auto probes = box_probes(grid, 5);
  std::vector<double> defect(probes.size(), 0.0);
  parallel_for(static_cast<std::ptrdiff_t>(probes.size()), mode,
               [&](std::ptrdiff_t p) {
                 const Eigen::VectorXd& f = probes[p];
                 const Eigen::VectorXd r = a.apply(adag.apply(f)) -
                                           adag.apply(a.apply(f)) -
                                           two_s * wprime.cwiseProduct(f);
                 defect[p] = interior_norm(r, margin) / f.norm();
               });
  return *std::max_element(defect.begin(), defect.end());
}

BandMatrix base_hamiltonian(const Eigen::VectorXd& v_samples,
                            const SpatialGrid& grid, const PhysParams& params) {
  require_params(params, "base_hamiltonian");
  if (v_samples.size() != grid.n_points)
    throw std::invalid_argument("base_hamiltonian: sample count mismatch");
  if (!v_samples.allFinite())
    throw std::invalid_argument("base_hamiltonian: non-finite potential");
  const int n = grid.n_points;
  const double s2 = params.scale() * params.scale();  // ħ²/2m
  const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());

  BandMatrix h(n, 1);
  for (int i = 0; i < n; ++i) {
    h.at(i, i) = 2.0 * s2 * inv_dx2 + v_samples[i];
    if (i + 1 < n) h.at(i, i + 1) = -s2 * inv_dx2;
    if (i - 1 >= 0) h.at(i, i - 1) = -s2 * inv_dx2;
  }
  return h;
}

ShiftIdentityReport shift_identity_check(const Eigen::VectorXd& v_samples,
                                         const SuperpotentialField& w,
                                         const SpatialGrid& grid,
                                         const PhysParams& params,
                                         BoundaryPolicy policy) {
  const GridWavefunction psi0 = ground_state_from_w(w, grid, params, policy);
  const BandMatrix h = base_hamiltonian(v_samples, grid, params);
  const EigenpairsResult ground = lowest_eigenpairs(h, 1);

  ShiftIdentityReport rep;
  rep.epsilon0 = ground.values[0];
  rep.ground_overlap = std::abs(psi0.samples.dot(ground.vectors.col(0))) /
                       psi0.samples.norm();
  if (rep.ground_overlap < 1.0 - 1e-6)
    throw NumericGuardError(
        "shift_identity_check: ground state from W does not match the "
        "numerical ground state (overlap deficit " +
        sci(1.0 - rep.ground_overlap) + ")");

  const auto [v_plus, v_minus] = partner_potentials(w, params);
  const int margin = 2;
  double dp = 0.0, dm = 0.0;
  for (int j = margin; j < grid.n_points - margin; ++j) {
    const double target = v_samples[j] - rep.epsilon0;
    dp = std::max(dp, std::abs(v_plus[j] - target));
    dm = std::max(dm, std::abs(v_minus[j] - target));
  }
  rep.dev_plus = dp;
  rep.dev_minus = dm;
  rep.matched = dm <= dp ? -1 : +1;
  rep.matched_dev = std::min(dp, dm);
  return rep;
}

InvarianceReport invariance_check(const BandMatrix& h,
                                  const BandMatrix& h_minus, double epsilon0,
                                  const SpatialGrid& grid, ExecMode mode) {
  if (h.n != h_minus.n || h.n != grid.n_points)
    throw std::invalid_argument("invariance_check: dimension mismatch");
  InvarianceReport rep;

  // (i) [H − ε₀I, H]: exact cancellation, only addition-order roundoff.
  const BandMatrix shifted = band_add(
      h, BandMatrix::diagonal(Eigen::VectorXd::Ones(h.n)), 1.0, -epsilon0);
  const BandMatrix self_comm = band_add(band_multiply(shifted, h),
                                        band_multiply(h, shifted), 1.0, -1.0);
  const double h_scale = h.max_abs();
  rep.self_commutator_rel = self_comm.max_abs() / (h_scale * h_scale);

  // (ii) [A†A, H] on rows far enough from the walls that both product
  // orders are translation invariant (margin = sum of bandwidths + 1).
  const BandMatrix partner_comm = band_add(
      band_multiply(h_minus, h), band_multiply(h, h_minus), 1.0, -1.0);
  const int comm_margin = h_minus.kd + h.kd + 1;
  rep.partner_commutator_rel = interior_max_abs(partner_comm, comm_margin) /
                               (h_minus.max_abs() * h_scale);

  // (iii) probe-based defect of A†A against H − ε₀I. Rows closer to the
  // wall than the A†A bandwidth carry truncated stencils, so the interior
  // margin follows the bandwidth rather than a fixed cell count.
  const int probe_margin = h_minus.kd;
  const auto probes = box_probes(grid, 5);
  std::vector<double> defect(probes.size(), 0.0);
  parallel_for(static_cast<std::ptrdiff_t>(probes.size()), mode,
               [&](std::ptrdiff_t p) {
                 const Eigen::VectorXd& f = probes[p];
                 const Eigen::VectorXd r =
                     h_minus.apply(f) - h.apply(f) + epsilon0 * f;
                 defect[p] = interior_norm(r, probe_margin) / f.norm();
               });
  rep.discretization_defect = *std::max_element(defect.begin(), defect.end());
  return rep;
}

SpectrumReport pairing_report(const BandMatrix& h_minus,
                              const BandMatrix& h_plus, const BandMatrix& a,
                              const SpatialGrid& grid, int k_pairs,
                              ExecMode mode) {
  if (h_minus.n != h_plus.n || h_minus.n != a.n || a.n != grid.n_points)
    throw std::invalid_argument("pairing_report: dimension mismatch");
  if (k_pairs < 1)
    throw std::invalid_argument("pairing_report: k_pairs must be >= 1");

  SpectrumReport rep;

  // W ≡ 0 makes A antisymmetric and the partners identical.
  double diag_max = 0.0;
  for (int i = 0; i < a.n; ++i) diag_max = std::max(diag_max, std::abs(a.entry(i, i)));
  rep.degenerate_free_case = diag_max <= 1e-14;

  const int m_solve = std::min(a.n - 1, 4 * (k_pairs + 1) + 4);
  const EigenpairsResult em = lowest_eigenpairs(h_minus, m_solve);
  const EigenpairsResult ep = lowest_eigenpairs(h_plus, m_solve);

  std::vector<int> smooth_minus, smooth_plus;
  for (int i = 0; i < m_solve; ++i) {
    if (nyquist_fraction(em.vectors.col(i)) < 0.5)
      smooth_minus.push_back(i);
    else
      rep.filtered_minus.push_back(em.values[i]);
    if (nyquist_fraction(ep.vectors.col(i)) < 0.5)
      smooth_plus.push_back(i);
    else
      rep.filtered_plus.push_back(ep.values[i]);
  }

  int k = k_pairs;
  const int k_avail = std::min(static_cast<int>(smooth_minus.size()) - 1,
                               static_cast<int>(smooth_plus.size()));
  if (k_avail < k) {
    k = std::max(0, k_avail);
    rep.warning = "only " + std::to_string(k) +
                  " bound pairs resolved below the box threshold; shrunk from " +
                  std::to_string(k_pairs);
  }
  rep.k_pairs = k;

  for (int i = 0; i <= k && i < static_cast<int>(smooth_minus.size()); ++i)
    rep.e_minus.push_back(em.values[smooth_minus[i]]);
  for (int i = 0; i < k && i < static_cast<int>(smooth_plus.size()); ++i)
    rep.e_plus.push_back(ep.values[smooth_plus[i]]);
  for (int n = 1; n <= k; ++n) {
    PairRow row;
    row.n = n;
    row.e_minus = rep.e_minus[n];
    row.e_plus = rep.e_plus[n - 1];
    row.deviation = std::abs(row.e_plus - row.e_minus);
    rep.pairs.push_back(row);
  }

  // Intertwining A H₋ = H₊ A over the lowest physical modes, and the
  // residual of the mapped states A ψ_n as eigenstates of H₊. The ground
  // state is excluded from the mapped residual: A annihilates it.
  const int n_twine = std::min<int>(3, static_cast<int>(smooth_minus.size()));
  std::vector<double> twine(std::max(1, n_twine), 0.0);
  parallel_for(n_twine, mode, [&](std::ptrdiff_t i) {
    const Eigen::VectorXd psi = em.vectors.col(smooth_minus[i]);
    twine[i] = (a.apply(h_minus.apply(psi)) - h_plus.apply(a.apply(psi))).norm() /
               psi.norm();
  });
  rep.intertwining_defect_max = *std::max_element(twine.begin(), twine.end());

  for (int i = 1; i <= k && i < static_cast<int>(smooth_minus.size()); ++i) {
    const Eigen::VectorXd apsi = a.apply(em.vectors.col(smooth_minus[i]));
    const double res =
        (h_plus.apply(apsi) - em.values[smooth_minus[i]] * apsi).norm();
    rep.mapped_residual_max = std::max(rep.mapped_residual_max, res);
  }
  return rep;
}

}  // namespace lvn
