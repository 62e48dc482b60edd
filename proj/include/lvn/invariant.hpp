// invariant.hpp — Lewis-Riesenfeld invariant machinery: invariant transport
// and residual checks against the Liouville–von Neumann equation, eigenframe
// tracking with parallel-transport gauge fixing, phase integrals, solution
// assembly, a direct Schrödinger oracle, and the unitary reduction to a
// time-independent invariant.
#pragma once

#include "lvn/core.hpp"
#include "lvn/exec.hpp"

namespace lvn {

// Invariant samples plus the per-sample defect of the invariance equation
// dI/dt + (1/i)[I,H] = 0. Interior samples use centered differences for
// dI/dt; the endpoints use one-sided second-order stencils.
struct InvariantPath {
  OperatorPath path;
  std::vector<double> residuals;  // Frobenius norm per sample
  double residual_max = 0.0;
  double residual_max_entry = 0.0;  // same defect in the max-entry norm
};

// Mode-matched eigenvector frames of an invariant. Mode identity follows
// maximum-overlap matching step to step (not eigenvalue sorting), and each
// frame carries the parallel-transport gauge: consecutive same-mode
// overlaps are real positive.
struct EigenframePath {
  TimeGrid grid;
  Eigen::VectorXd eigenvalues;  // time-constant; ascending at t0
  std::vector<Matrix> frames;   // per sample, one column per mode
  double spectrum_spread = 0.0;       // max over modes of (max_k − min_k) λ_n(t_k)
  double min_consecutive_overlap = 1.0;  // smallest |<λ_n,k|λ_n,k+1>| seen
};

// Per-mode phase integrals on the grid: total = dynamical + geometric,
// with dynamical = ∫⟨λ_n|H|λ_n⟩dt and geometric = ∫(−i)⟨λ_n|∂_t λ_n⟩dt.
struct PhaseRecord {
  TimeGrid grid;
  std::vector<Eigen::VectorXd> total;      // [mode](sample)
  std::vector<Eigen::VectorXd> dynamical;  // [mode](sample)
  std::vector<Eigen::VectorXd> geometric;  // [mode](sample)
};

// Mode coefficients of the initial state and the assembled trajectory
// Ψ(t_k) = Σ_n C_n exp(−i φ_n(t_k)) |λ_n, t_k⟩.
struct LRSolution {
  Vector coefficients;
  std::vector<Vector> states;  // one per sample
};

// Output of the unitary reduction I_V = V†IV, H_V = V†HV − i·V†(dV/dt).
struct ReductionResult {
  OperatorPath i_v;
  OperatorPath h_v;
  double iv_time_variation = 0.0;  // max-entry drift of I_V from its t0 value
  double hv_hermiticity = 0.0;     // max hermiticity defect over H_V samples
};

// H_V expressed in the eigenbasis of I_V(t0): diagonal values d_n(t_k)
// (the candidate phase rates), their cumulative trapezoid integrals, and
// the off-diagonal / imaginary defects of the diagonalization claim.
struct ReducedDiagonalReport {
  Eigen::VectorXd basis_values;             // eigenvalues of I_V(t0), ascending
  std::vector<Eigen::VectorXd> d;           // [mode](sample), real parts
  std::vector<Eigen::VectorXd> d_integral;  // cumulative ∫d_n dt, trapezoid
  double offdiag_defect = 0.0;   // max |off-diagonal entry| over samples
  double imag_defect = 0.0;      // max |Im diagonal entry| over samples
  double phase_match_defect = -1.0;  // max |∫d_n dt − φ_n| when phases given
};

// Transports a Hermitian seed with the midpoint-exponential propagator:
// I(t_k) = U_k i0 U_k†, U_k the ordered product of per-step propagators.
// The result satisfies the invariance equation by construction; the stored
// residuals measure the discretization error.
InvariantPath propagate_invariant(const OperatorPath& h_path, const Matrix& i0,
                                  ExecMode mode = ExecMode::Serial,
                                  double herm_tol = 1e-10);

// Per-sample defect ‖ΔI/Δt + (1/i)[I,H]‖ (Frobenius); centered differences
// on interior samples, one-sided second-order at the ends. max_entry_out,
// when given, receives the same defect measured in the max-entry norm.
std::vector<double> invariant_residual(const OperatorPath& i_path,
                                       const OperatorPath& h_path,
                                       ExecMode mode = ExecMode::Serial,
                                       double* max_entry_out = nullptr);

// Eigh per sample, maximum-|overlap| mode matching against the previous
// frame, then gauge fixing to real-positive consecutive overlaps.
// Degenerate spectra (gap < degeneracy_gap) and overlap matrices far from a
// permutation (max |overlap|² < 0.5) are rejected with step diagnostics.
EigenframePath track_eigenframe(const InvariantPath& inv,
                                double degeneracy_gap = 1e-8,
                                ExecMode mode = ExecMode::Serial);

// Dynamical integrand ⟨λ_n|H|λ_n⟩ and geometric integrand −i⟨λ_n|∂_tλ_n⟩
// (centered differences of the frames), integrated by the trapezoid rule
// with φ_n(t0) = 0. Imaginary parts beyond realness_tol signal a broken
// gauge and are rejected.
PhaseRecord compute_phases(const EigenframePath& frame,
                           const OperatorPath& h_path,
                           double realness_tol = 1e-6,
                           ExecMode mode = ExecMode::Serial);

// C_n = ⟨λ_n, t0|ψ0⟩; ψ0 must be normalized within norm_tol.
Vector project_initial(const Vector& psi0, const Matrix& frame_t0,
                       double norm_tol = 1e-10);

// Ψ(t_k) = Σ_n C_n exp(−i φ_n(t_k)) |λ_n, t_k⟩ (phase convention
// exp[(1/i)φ] = exp[−iφ]).
LRSolution assemble_solution(const Vector& c, const PhaseRecord& phases,
                             const EigenframePath& frame);

// Steps ψ with the midpoint unitary propagator, H at the interval midpoint
// taken as the average of the two endpoint samples.
std::vector<Vector> direct_schrodinger(const OperatorPath& h_path,
                                       const Vector& psi0,
                                       ExecMode mode = ExecMode::Serial);

// I_V = V†IV and H_V = V†HV − i·V†(ΔV/Δt) per sample; centered differences
// for ΔV/Δt with one-sided second-order stencils at the endpoints.
ReductionResult unitary_reduce(const OperatorPath& v_path,
                               const OperatorPath& i_path,
                               const OperatorPath& h_path,
                               double unitary_tol = 1e-10,
                               ExecMode mode = ExecMode::Serial);

// Expresses H_V in the I_V(t0) eigenbasis and extracts the diagonal rates;
// when phases is given, compares ∫d_n dt with the phase totals mode by mode
// (ascending-eigenvalue mode order on both sides).
ReducedDiagonalReport check_reduced_diagonal(const ReductionResult& red,
                                             const PhaseRecord* phases = nullptr);

}  // namespace lvn
