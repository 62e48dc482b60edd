// susy.hpp — superpotential factorization on a 1-D grid: ground state from
// W(x), partner potentials, ladder operators and partner Hamiltonians as
// banded matrices, defect checks (commutator, shift identity, invariance,
// intertwining), and spectral pairing with filtering of grid artifacts.
#pragma once

#include <utility>

#include <Eigen/Dense>

#include "lvn/core.hpp"
#include "lvn/exec.hpp"

namespace lvn {

// ħ and m appear only through the ladder scale ħ/√(2m); the defaults make
// that scale 1 so the reference spectra are integer spaced.
struct PhysParams {
  double hbar = 1.0;
  double mass = 0.5;

  double scale() const;  // ħ/√(2m)
};

// Uniform spatial grid x_j = x_min + j·dx, j = 0..n_points−1.
struct SpatialGrid {
  double x_min = 0.0;
  double x_max = 0.0;
  int n_points = 0;

  double dx() const { return (x_max - x_min) / (n_points - 1); }
  double x(int j) const { return x_min + j * dx(); }
};

SpatialGrid make_spatial_grid(double x_min, double x_max, int n_points);

// W(x) and W′(x) sampled on the grid; W′ falls back to centered differences
// of the W samples (one-sided second order at the edges) when no analytic
// derivative is supplied.
struct SuperpotentialField {
  Eigen::VectorXd w;
  Eigen::VectorXd wprime;
};

SuperpotentialField make_superpotential(
    const SpatialGrid& grid, const std::function<double(double)>& w,
    const std::function<double(double)>& wprime = nullptr);

SuperpotentialField superpotential_from_samples(
    const SpatialGrid& grid, Eigen::VectorXd w_samples,
    const Eigen::VectorXd* wprime_samples = nullptr);

// Real banded matrix: entry (i, j) lives at bands(kd + i − j, j) for
// |i − j| ≤ kd. Unused corner slots stay zero.
struct BandMatrix {
  int n = 0;
  int kd = 0;
  Eigen::MatrixXd bands;  // (2kd+1) × n

  BandMatrix() = default;
  BandMatrix(int n_, int kd_);
  static BandMatrix diagonal(const Eigen::VectorXd& d);

  double& at(int i, int j);            // checked, must be inside the band
  double entry(int i, int j) const;    // zero outside the band
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  BandMatrix transpose() const;
  double max_abs() const;
  double asymmetry() const;  // max |entry(i,j) − entry(j,i)|
};

// c_a·a + c_b·b with the wider bandwidth of the two.
BandMatrix band_add(const BandMatrix& a, const BandMatrix& b, double c_a = 1.0,
                    double c_b = 1.0);
// a·b, bandwidth kd_a + kd_b.
BandMatrix band_multiply(const BandMatrix& a, const BandMatrix& b);
// Max |entry| over rows margin..n−1−margin.
double interior_max_abs(const BandMatrix& m, int margin);

// Lowest `count` eigenpairs of a symmetric banded matrix, ascending;
// tridiagonal input uses the MRRR solver, wider bands the banded
// bisection/inverse-iteration solver (which needs an n×n workspace).
struct EigenpairsResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // n × count, Euclidean-normalized columns
};
EigenpairsResult lowest_eigenpairs(const BandMatrix& m, int count);

// Boundary handling for ground states that do not decay inside the box:
// RequireDecay rejects them, FiniteBox accepts and flags.
enum class BoundaryPolicy { RequireDecay, FiniteBox };

struct GridWavefunction {
  Eigen::VectorXd samples;  // trapezoid-normalized
  bool decays = false;      // |ψ| at both endpoints ≤ 1e-8 × max|ψ|
};

// ψ₀(x_j) ∝ exp[−(√(2m)/ħ)·∫_{x_min}^{x_j} W dx] via cumulative trapezoid,
// L2-normalized with trapezoid weights; nodeless by construction.
GridWavefunction ground_state_from_w(
    const SuperpotentialField& w, const SpatialGrid& grid,
    const PhysParams& params,
    BoundaryPolicy policy = BoundaryPolicy::RequireDecay);

// V± = W² ± (ħ/√(2m))·W′, returned as (V₊, V₋).
std::pair<Eigen::VectorXd, Eigen::VectorXd> partner_potentials(
    const SuperpotentialField& w, const PhysParams& params);

// A = s·D + diag(W) and A† = −s·D + diag(W) with s = ħ/√(2m) and D the
// centered antisymmetric first difference (Dirichlet outside the box).
// D uses the 4th-order 5-point stencil: the 3-point variant leaves an
// O(dx²) annihilation defect on ψ₀ (~1e-5 at the reference grid) that
// swamps the factorization identities this module is meant to exhibit.
// Returned as (A, A†); A† is exactly the matrix transpose of A.
std::pair<BandMatrix, BandMatrix> ladder_operators(
    const SuperpotentialField& w, const SpatialGrid& grid,
    const PhysParams& params);

// H₋ = A†A and H₊ = AA† as banded products; exact symmetry is verified.
std::pair<BandMatrix, BandMatrix> partner_hamiltonians(const BandMatrix& a,
                                                       const BandMatrix& adag);

// max over the lowest 5 box modes f of
// ‖([A,A†] − 2s·diag(W′))f‖ / ‖f‖ on interior rows.
double commutator_defect(const BandMatrix& a, const BandMatrix& adag,
                         const Eigen::VectorXd& wprime,
                         const SpatialGrid& grid, const PhysParams& params,
                         ExecMode mode = ExecMode::Serial);

// H = −(ħ²/2m)·D₂ + diag(V) with the second-order centered Laplacian and
// Dirichlet boundaries.
BandMatrix base_hamiltonian(const Eigen::VectorXd& v_samples,
                            const SpatialGrid& grid, const PhysParams& params);

struct ShiftIdentityReport {
  double epsilon0 = 0.0;        // lowest eigenvalue of H
  double ground_overlap = 0.0;  // |⟨ψ₀, ground(H)⟩|
  double dev_plus = 0.0;        // max interior |V₊ − (V − ε₀)|
  double dev_minus = 0.0;       // max interior |V₋ − (V − ε₀)|
  int matched = 0;              // +1 or −1: which partner satisfies the identity
  double matched_dev = 0.0;
};

// Computes ε₀ by diagonalizing H, verifies ψ₀ against the numerical ground
// state (overlap ≥ 1 − 1e-6), then tests both partner potentials against
// V − ε₀ and reports which one matches.
ShiftIdentityReport shift_identity_check(const Eigen::VectorXd& v_samples,
                                         const SuperpotentialField& w,
                                         const SpatialGrid& grid,
                                         const PhysParams& params,
                                         BoundaryPolicy policy =
                                             BoundaryPolicy::RequireDecay);

struct InvarianceReport {
  // max-entry ‖[H − ε₀I, H]‖ / ‖H‖²: algebraically zero, roundoff remains.
  double self_commutator_rel = 0.0;
  // max-entry interior ‖[A†A, H]‖ / (‖A†A‖·‖H‖); the interior margin is the
  // stencil reach of the banded product, inside which the commutator rows
  // are translation invariant.
  double partner_commutator_rel = 0.0;
  // max over box-mode probes of ‖(A†A − (H − ε₀I))f‖ / ‖f‖, interior rows;
  // O(dx²), dominated by the Laplacian stencil difference and the ε₀ error.
  double discretization_defect = 0.0;
};

InvarianceReport invariance_check(const BandMatrix& h,
                                  const BandMatrix& h_minus, double epsilon0,
                                  const SpatialGrid& grid,
                                  ExecMode mode = ExecMode::Serial);

struct PairRow {
  int n = 0;           // index into the H₋ spectrum (1-based pairing)
  double e_minus = 0;  // E₋(n)
  double e_plus = 0;   // E₊(n−1)
  double deviation = 0;
};

struct SpectrumReport {
  std::vector<double> e_minus;  // physical levels of H₋, ascending
  std::vector<double> e_plus;   // physical levels of H₊, ascending
  std::vector<PairRow> pairs;   // E₊_{n−1} ↔ E₋_n for n = 1..K
  // Checkerboard-mode levels excluded by the smoothness filter. Any
  // antisymmetric first difference annihilates the grid's alternating-sign
  // mode, so A†A/AA† on a closed box carry spurious high-frequency partners
  // of the physical spectrum; eigenvectors with more than half their energy
  // at the grid Nyquist scale are reported here instead of being paired.
  std::vector<double> filtered_minus;
  std::vector<double> filtered_plus;
  double intertwining_defect_max = 0.0;  // ‖(A·H₋ − H₊·A)ψ‖/‖ψ‖, lowest modes
  double mapped_residual_max = 0.0;      // ‖H₊(Aψ_n) − E₋_n(Aψ_n)‖, n ≥ 1
  bool degenerate_free_case = false;     // W ≡ 0: H₊ = H₋
  int k_pairs = 0;
  std::string warning;  // set when K had to shrink
};

SpectrumReport pairing_report(const BandMatrix& h_minus,
                              const BandMatrix& h_plus, const BandMatrix& a,
                              const SpatialGrid& grid, int k_pairs = 5,
                              ExecMode mode = ExecMode::Serial);

}  // namespace lvn
