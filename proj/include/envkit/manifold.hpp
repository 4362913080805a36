#pragma once

// First-order minimization on the unit sphere and on the Stiefel manifold of
// p x k matrices with orthonormal columns.
//
// Both solvers take Barzilai-Borwein steps along a Cayley-transform curve
// (which preserves orthonormality exactly in exact arithmetic) and accept a
// step once the objective drops below the maximum of the last
// `nonmonotone_window` accepted values by a sufficient-decrease margin.

#include <functional>
#include <string_view>
#include <vector>

#include "envkit/linalg.hpp"
#include "envkit/objectives.hpp"

namespace envkit {

struct SolverOptions {
  double xtol = 1e-8;
  double gtol = 1e-8;
  double ftol = 1e-12;
  int max_iter = 800;
  int nonmonotone_window = 5;
  double min_step = 1e-20;
  double max_step = 1e20;
  double initial_step = 1e-3;
  double backtrack = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 20;

  /// Throws InvalidConfig for non-positive tolerances or counts.
  void validate() const;
};

enum class StopReason { Xtol, Gtol, Ftol, MaxIter };

std::string_view to_string(StopReason r);

struct SolverReport {
  Matrix minimizer;  // p x k; p x 1 for the sphere solver
  double objective = 0.0;
  int iterations = 0;
  StopReason converged_by = StopReason::MaxIter;
  bool line_search_failed = false;
  std::vector<double> trace;       // objective at iterate 0..iterations
  double max_feasibility_error = 0.0;  // max ||X^T X - I||_F over iterates
};

/// Objective callback: returns f(x) and, when `grad` is non-null, writes the
/// Euclidean gradient.
using MatrixObjective = std::function<double(const Matrix& x, Matrix* grad)>;
using VectorObjective = std::function<double(const Vector& x, Vector* grad)>;

/// Starting direction for one 1D step: the eigenvector of Mk or of Mk + Uk
/// with the smallest phi. Eigenvectors of Mk are scanned first, each set in
/// descending eigenvalue order; ties keep the earlier candidate.
Vector init_1d(const SymMatrix& mk, const SymMatrix& uk);
Vector init_1d(const PhiProblem& phi);

SolverReport optimize_sphere(const VectorObjective& f, const Vector& v0,
                             const SolverOptions& opts = {});

SolverReport optimize_stiefel(const MatrixObjective& f, const SemiOrthoBasis& g0,
                              const SolverOptions& opts = {});

}  // namespace envkit
