// bench.cpp — serial vs OpenMP timing of the per-sample kernels, plus a
// bitwise comparison of the two modes' results. The parallel loops assign
// each sample to its own slot, so the outputs must match exactly; any
// nonzero difference here is a bug, not noise.
#include <chrono>
#include <cstdio>
#include <random>

#include "lvn/core.hpp"
#include "lvn/exec.hpp"
#include "lvn/invariant.hpp"

namespace {

using lvn::complexd;
using lvn::Matrix;

// Deterministic pseudo-random Hermitian matrix. Raw mt19937 draws are
// bit-exact across implementations (distributions are not).
Matrix random_hermitian(int dim, std::mt19937& gen) {
  const double scale = 1.0 / 4294967296.0;  // 2^-32
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      m(i, j) = complexd(gen() * scale - 0.5, gen() * scale - 0.5);
  return Matrix(0.5 * (m + m.adjoint()));
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

template <typename F>
double best_of(int repeats, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, ms_since(t0));
  }
  return best;
}

double path_distance(const lvn::OperatorPath& a, const lvn::OperatorPath& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.samples.size(); ++k)
    m = std::max(m, lvn::max_abs(a.samples[k] - b.samples[k]));
  return m;
}

}  // namespace

int main() {
  const int dim = 8;
  const int n_steps = 2000;
  const int repeats = 3;

  std::mt19937 gen(12345);
  const Matrix h0 = random_hermitian(dim, gen);
  const Matrix h1 = random_hermitian(dim, gen);
  const Matrix i0 = random_hermitian(dim, gen);
  const lvn::TimeGrid grid = lvn::make_grid(0.0, 2.0, n_steps);
  const lvn::OperatorPath h_path = lvn::sample_path(grid, [&](double t) {
    return Matrix(h0 + std::cos(t) * h1);
  });

  std::printf("dim %d, %d steps, best of %d, %d thread(s)\n", dim, n_steps,
              repeats, lvn::max_threads());
  std::printf("%-22s %12s %12s %9s %12s\n", "kernel", "serial [ms]",
              "parallel [ms]", "speedup", "max |diff|");

  const auto report = [&](const char* name, double ts, double tp,
                          double diff) {
    std::printf("%-22s %12.2f %12.2f %9.2f %12.3e\n", name, ts, tp, ts / tp,
                diff);
  };

  // Invariant transport (parallel part: similarity transforms + residuals).
  lvn::InvariantPath inv_s, inv_p;
  const double t1s = best_of(repeats, [&] {
    inv_s = lvn::propagate_invariant(h_path, i0, lvn::ExecMode::Serial);
  });
  const double t1p = best_of(repeats, [&] {
    inv_p = lvn::propagate_invariant(h_path, i0, lvn::ExecMode::Parallel);
  });
  report("propagate_invariant", t1s, t1p, path_distance(inv_s.path, inv_p.path));

  // Residual evaluation over the transported path.
  std::vector<double> res_s, res_p;
  const double t2s = best_of(repeats, [&] {
    res_s = lvn::invariant_residual(inv_s.path, h_path, lvn::ExecMode::Serial);
  });
  const double t2p = best_of(repeats, [&] {
    res_p = lvn::invariant_residual(inv_s.path, h_path, lvn::ExecMode::Parallel);
  });
  double rdiff = 0.0;
  for (std::size_t k = 0; k < res_s.size(); ++k)
    rdiff = std::max(rdiff, std::abs(res_s[k] - res_p[k]));
  report("invariant_residual", t2s, t2p, rdiff);

  // Eigenframe tracking (parallel part: per-sample eigendecompositions).
  lvn::EigenframePath fr_s, fr_p;
  const double t3s = best_of(repeats, [&] {
    fr_s = lvn::track_eigenframe(inv_s, 1e-8, lvn::ExecMode::Serial);
  });
  const double t3p = best_of(repeats, [&] {
    fr_p = lvn::track_eigenframe(inv_s, 1e-8, lvn::ExecMode::Parallel);
  });
  double fdiff = 0.0;
  for (std::size_t k = 0; k < fr_s.frames.size(); ++k)
    fdiff = std::max(fdiff, lvn::max_abs(fr_s.frames[k] - fr_p.frames[k]));
  report("track_eigenframe", t3s, t3p, fdiff);

  // Phase integrals (parallel over modes).
  lvn::PhaseRecord ph_s, ph_p;
  const double t4s = best_of(repeats, [&] {
    ph_s = lvn::compute_phases(fr_s, h_path, 1e-6, lvn::ExecMode::Serial);
  });
  const double t4p = best_of(repeats, [&] {
    ph_p = lvn::compute_phases(fr_s, h_path, 1e-6, lvn::ExecMode::Parallel);
  });
  double pdiff = 0.0;
  for (std::size_t n = 0; n < ph_s.total.size(); ++n)
    pdiff = std::max(pdiff,
                     (ph_s.total[n] - ph_p.total[n]).cwiseAbs().maxCoeff());
  report("compute_phases", t4s, t4p, pdiff);

  // Unitary reduction (parallel per-sample frame changes).
  const lvn::OperatorPath v_path = lvn::sample_path(grid, [&](double t) {
    return lvn::step_propagator(h0, t);
  });
  lvn::ReductionResult red_s, red_p;
  const double t5s = best_of(repeats, [&] {
    red_s = lvn::unitary_reduce(v_path, inv_s.path, h_path, 1e-10,
                                lvn::ExecMode::Serial);
  });
  const double t5p = best_of(repeats, [&] {
    red_p = lvn::unitary_reduce(v_path, inv_s.path, h_path, 1e-10,
                                lvn::ExecMode::Parallel);
  });
  const double vdiff = std::max(path_distance(red_s.i_v, red_p.i_v),
                                path_distance(red_s.h_v, red_p.h_v));
  report("unitary_reduce", t5s, t5p, vdiff);

  const double worst = std::max({path_distance(inv_s.path, inv_p.path), rdiff,
                                 fdiff, pdiff, vdiff});
  std::printf("\nserial/parallel agreement: max |diff| %.3e %s\n", worst,
              worst == 0.0 ? "(bitwise identical)" : "(MISMATCH)");
  return worst == 0.0 ? 0 : 1;
}
