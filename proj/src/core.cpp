// core.cpp — implementation of the dense complex-operator substrate.
#include "lvn/core.hpp"

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

}  // namespace

TimeGrid make_grid(double t0, double t_final, int n_steps) {
  if (!(std::isfinite(t0) && std::isfinite(t_final)))
    throw std::invalid_argument("make_grid: endpoints must be finite");
  if (n_steps < 1)
    throw std::invalid_argument("make_grid: n_steps must be >= 1");
  if (!(t_final > t0))
    throw std::invalid_argument("make_grid: t_final must exceed t0");
  return TimeGrid{t0, (t_final - t0) / n_steps, n_steps};
}

OperatorPath sample_path(const TimeGrid& grid,
                         const std::function<Matrix(double)>& op_of_t) {
  OperatorPath path;
  path.grid = grid;
  path.samples.reserve(grid.n_samples());
  for (int k = 0; k < grid.n_samples(); ++k) {
    path.samples.push_back(op_of_t(grid.time(k)));
    const Matrix& m = path.samples.back();
    if (m.rows() != m.cols())
      throw std::invalid_argument("sample_path: operator samples must be square");
    if (m.rows() != path.samples.front().rows())
      throw std::invalid_argument("sample_path: operator samples change dimension");
  }
  return path;
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double frobenius(const Matrix& m) { return m.norm(); }

Matrix commutator(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw std::invalid_argument("commutator: dimension mismatch");
  return a * b - b * a;
}

double hermiticity_defect(const Matrix& m) {
  return max_abs(m - m.adjoint());
}

bool check_hermitian(const Matrix& m, double tol, double* defect) {
  const double d = hermiticity_defect(m);
  if (defect) *defect = d;
  return d <= tol;
}

void require_hermitian(const Matrix& m, double tol, const std::string& who) {
  double d = 0.0;
  if (!check_hermitian(m, tol, &d))
    throw NumericGuardError(who + ": input not Hermitian (defect " + sci(d) +
                            ", tol " + sci(tol) + ")");
}

double unitarity_defect(const Matrix& u) {
  return max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
}

void require_unitary(const Matrix& u, double tol, const std::string& who) {
  const double d = unitarity_defect(u);
  if (d > tol)
    throw NumericGuardError(who + ": input not unitary (defect " + sci(d) +
                            ", tol " + sci(tol) + ")");
}

EighResult eigh(const Matrix& m, double herm_tol) {
  require_hermitian(m, herm_tol, "eigh");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success)
    throw NumericGuardError("eigh: eigendecomposition did not converge");
  return EighResult{solver.eigenvalues(), solver.eigenvectors()};
}

Matrix step_propagator(const Matrix& h, double dt, double herm_tol) {
  EighResult es = eigh(h, herm_tol);
  const int n = static_cast<int>(es.values.size());
  Vector phases(n);
  for (int i = 0; i < n; ++i)
    phases[i] = std::exp(complexd(0.0, -es.values[i] * dt));
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

double min_gap(const Eigen::VectorXd& ascending) {
  if (ascending.size() < 2)
    return std::numeric_limits<double>::infinity();
  double g = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < ascending.size(); ++i)
    g = std::min(g, ascending[i + 1] - ascending[i]);
  return g;
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << complexd(0, 0), complexd(0, -1), complexd(0, 1), complexd(0, 0);
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

}  // namespace lvn
