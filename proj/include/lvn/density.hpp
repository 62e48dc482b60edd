// density.hpp — density-operator dynamics: pure-state outer products, the
// Liouville–von Neumann right-hand side, the two-level component ODEs,
// fixed-step RK4 integration with conservation guards, and observables.
#pragma once

#include "lvn/core.hpp"

namespace lvn {

// Two-level model H = [[ω_a, V_ab(t)], [V_ab*(t), ω_b]] (ħ = 1) with the
// coupling supplied as samples on a grid and linearly interpolated at RK4
// stage times.
struct TwoLevelParams {
  double omega_a = 0.0;
  double omega_b = 0.0;
  TimeGrid grid;
  std::vector<complexd> coupling;  // V_ab(t_k)

  complexd coupling_at(double t) const;
  Matrix hamiltonian(double t) const;
};

struct Observables {
  double rho_aa = 0.0;
  double rho_bb = 0.0;
  double re_coherence = 0.0;  // Re ρ_ab
  double im_coherence = 0.0;  // Im ρ_ab
  double purity = 0.0;        // Tr ρ²
  double trace = 0.0;         // Re Tr ρ
};

// Density samples with their per-sample conservation guards. Guards are
// reported, never silently corrected; the integrator aborts only on the
// hard trace limit or non-finite values.
struct DensityPath {
  TimeGrid grid;
  std::vector<Matrix> samples;
  std::vector<double> trace_defect;  // |Tr ρ − 1|
  std::vector<double> herm_defect;   // max-entry |ρ − ρ†|
  std::vector<double> purity;        // Tr ρ²

  double max_trace_defect() const;
  double max_herm_defect() const;
  double purity_drift() const;  // max |purity(t_k) − purity(t_0)|
};

// Validates the density-matrix contract: Hermitian, unit trace, eigenvalues
// ≥ −tol, purity within [1/dim − tol, 1 + tol].
void require_density(const Matrix& rho, double tol, const std::string& who);

// ρ = |ψ⟩⟨ψ| for a normalized state; purity 1 and rank 1 by construction.
Matrix density_from_state(const Vector& psi, double norm_tol = 1e-10);

// dρ/dt = −(1/i)[ρ,H] = −i[H,ρ]; Hermitian for Hermitian inputs.
Matrix lvn_rhs(const Matrix& rho, const Matrix& h);

struct TwoLevelDerivatives {
  double d_aa = 0.0;
  double d_bb = 0.0;  // exactly −d_aa as implemented
  complexd d_ab;
};

// Component form of the two-level equation of motion (ρ_ba = ρ_ab*):
//   dρ_aa/dt = −[iV_ab ρ_ba + c.c.] = −2·Re(i V_ab ρ_ab*)
//   dρ_bb/dt = +2·Re(i V_ab ρ_ab*)
//   dρ_ab/dt = −i(ω_a − ω_b)ρ_ab + iV_ab(ρ_aa − ρ_bb)
TwoLevelDerivatives two_level_rhs(double rho_aa, double rho_bb, complexd rho_ab,
                                  double omega_a, double omega_b,
                                  complexd v_ab);

// Classical fixed-step RK4 on the component ODEs. Trace is not
// renormalized; drift beyond the hard limit (1e-6) aborts.
DensityPath integrate_lvn(const TwoLevelParams& params, const Matrix& rho0,
                          const TimeGrid& grid);

// Classical fixed-step RK4 on the full matrix equation, H interpolated
// linearly between path samples at stage times.
DensityPath integrate_lvn(const OperatorPath& h_path, const Matrix& rho0);

// Populations, coherence, purity, trace. Imaginary parts of the
// populations beyond real_tol are rejected.
Observables observables(const Matrix& rho, double real_tol = 1e-12);

// max_k max-entry ‖ρ_k − |ψ_k⟩⟨ψ_k|‖ between a density path and a pure
// trajectory on the same grid.
double cross_check(const DensityPath& dp, const std::vector<Vector>& states);

}  // namespace lvn
