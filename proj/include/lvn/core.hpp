// core.hpp — dense complex-operator substrate: hermiticity/unitarity checks,
// commutators, Hermitian eigendecomposition, midpoint-exponential propagators,
// defect norms, and the shared time-grid / operator-path containers.
#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lvn {

using complexd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Breach of a numeric guard (hermiticity, unitarity, degeneracy, trace drift,
// ...). The CLI maps this to exit code 3.
struct NumericGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- time grid ---------------------------------------------------------------

// Uniform grid t_k = t0 + k·dt for k = 0..n_steps (n_steps intervals,
// n_steps + 1 samples).
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  int n_steps = 0;

  int n_samples() const { return n_steps + 1; }
  double time(int k) const { return t0 + k * dt; }
};

// Validates endpoints and step count; dt = (t_final − t0)/n_steps.
TimeGrid make_grid(double t0, double t_final, int n_steps);

// Operator samples on a shared grid, one matrix per grid point.
struct OperatorPath {
  TimeGrid grid;
  std::vector<Matrix> samples;

  int dim() const {
    return samples.empty() ? 0 : static_cast<int>(samples.front().rows());
  }
};

// Samples op_of_t(t_k) over the grid; all samples must share one dimension.
OperatorPath sample_path(const TimeGrid& grid,
                         const std::function<Matrix(double)>& op_of_t);

// --- norms and checks --------------------------------------------------------

double max_abs(const Matrix& m);    // max-entry norm, used for defect metrics
double frobenius(const Matrix& m);  // Frobenius norm, used for residual summaries

// ab − ba; dimensions must agree.
Matrix commutator(const Matrix& a, const Matrix& b);

// max-entry norm of m − m†.
double hermiticity_defect(const Matrix& m);
// True iff the defect is ≤ tol; the defect itself lands in *defect when given.
bool check_hermitian(const Matrix& m, double tol, double* defect = nullptr);
void require_hermitian(const Matrix& m, double tol, const std::string& who);

// max-entry norm of u†u − 1.
double unitarity_defect(const Matrix& u);
void require_unitary(const Matrix& u, double tol, const std::string& who);

// --- eigendecomposition and propagators ---------------------------------------

struct EighResult {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // orthonormal columns, values[i] ↔ vectors.col(i)
};

// Hermitian eigendecomposition with ascending eigenvalues. Hermiticity of the
// input is enforced against herm_tol before solving.
EighResult eigh(const Matrix& m, double herm_tol = 1e-12);

// U = exp(−i·h·dt) through the eigendecomposition of Hermitian h. Accurate to
// the solver, unitary to ~1e-15 for the small dimensions used here.
Matrix step_propagator(const Matrix& h, double dt, double herm_tol = 1e-12);

// Smallest gap between consecutive entries of an ascending eigenvalue list.
double min_gap(const Eigen::VectorXd& ascending);

// --- small constants -----------------------------------------------------------

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix identity(int dim);

}  // namespace lvn
