#include "envkit/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "envkit/error.hpp"

namespace envkit {

void SolverOptions::validate() const {
  if (!(xtol > 0 && gtol > 0 && ftol > 0)) {
    throw Error(ErrorCode::InvalidConfig, "solver tolerances must be positive");
  }
  if (max_iter < 1 || nonmonotone_window < 1 || max_backtracks < 0) {
    throw Error(ErrorCode::InvalidConfig, "solver iteration limits must be positive");
  }
  if (!(min_step > 0 && max_step >= min_step && initial_step > 0)) {
    throw Error(ErrorCode::InvalidConfig, "solver step bounds are inconsistent");
  }
  if (!(backtrack > 0 && backtrack < 1) || !(sufficient_decrease > 0)) {
    throw Error(ErrorCode::InvalidConfig, "line-search constants out of range");
  }
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Xtol: return "xtol";
    case StopReason::Gtol: return "gtol";
    case StopReason::Ftol: return "ftol";
    case StopReason::MaxIter: return "max_iter";
  }
  return "unknown";
}

namespace {

double checked_eval(const MatrixObjective& f, const Matrix& x, Matrix& grad) {
  const double v = f(x, &grad);
  if (!std::isfinite(v) || !grad.allFinite()) {
    throw Error(ErrorCode::NonFiniteObjective, "objective or gradient is not finite");
  }
  return v;
}

// Cayley curve on the sphere, closed form for a single column.
Matrix retract_sphere(const Matrix& x, const Matrix& g, double tau) {
  const double half = 0.5 * tau;
  const double xtg = x.col(0).dot(g.col(0));
  const double xx = x.col(0).squaredNorm();
  const double gg = g.col(0).squaredNorm();
  const double beta = 1.0 + half * half * (xx * gg - xtg * xtg);
  const double a1 = ((1.0 + half * xtg) * (1.0 + half * xtg) - half * half * xx * gg) / beta;
  const double a2 = -tau * xx / beta;
  return a1 * x + a2 * g;
}

// Y(tau) = (I + tau/2 A)^{-1} (I - tau/2 A) X with skew A = G X^T - X G^T.
Matrix retract_stiefel(const Matrix& x, const Matrix& g, double tau) {
  const Eigen::Index p = x.rows();
  const Matrix a = g * x.transpose() - x * g.transpose();
  const Matrix lhs = Matrix::Identity(p, p) + 0.5 * tau * a;
  const Matrix rhs = x - 0.5 * tau * (a * x);
  return lhs.partialPivLu().solve(rhs);
}

template <class Retract>
SolverReport run_bb(const MatrixObjective& f, Matrix x, const SolverOptions& o, Retract retract) {
  o.validate();
  const double sqrt_rows = std::sqrt(static_cast<double>(x.rows()));
  auto tangent_residual = [](const Matrix& xx, const Matrix& gg) -> Matrix {
    return gg - xx * (gg.transpose() * xx);
  };
  auto stationary = [&](double nrm, const Matrix& gg) {
    return nrm <= o.gtol * std::max(1.0, gg.norm());
  };

  SolverReport rep;
  Matrix g;
  double fx = checked_eval(f, x, g);
  Matrix d = tangent_residual(x, g);
  double nrm = d.norm();
  rep.trace.push_back(fx);
  rep.max_feasibility_error = orthogonality_error(x);

  auto finish = [&](const Matrix& xf, double ff, int itr, StopReason why) {
    rep.minimizer = xf;
    rep.objective = ff;
    rep.iterations = itr;
    rep.converged_by = why;
    return rep;
  };

  if (stationary(nrm, g)) return finish(x, fx, 0, StopReason::Gtol);

  std::deque<double> window{fx};
  std::deque<std::pair<double, double>> crit;  // (xdiff, fdiff)
  double tau = o.initial_step;
  Matrix best_x = x;
  double best_f = fx;

  for (int itr = 1; itr <= o.max_iter; ++itr) {
    const Matrix xp = x;
    const Matrix gp = g;
    const Matrix dp = d;
    const double fp = fx;
    const double ref = *std::max_element(window.begin(), window.end());
    const double deriv = o.sufficient_decrease * nrm * nrm;

    bool accepted = false;
    for (int nls = 0;; ++nls) {
      x = retract(xp, gp, tau);
      fx = checked_eval(f, x, g);
      if (fx <= ref - tau * deriv) {
        accepted = true;
        break;
      }
      if (nls >= o.max_backtracks) break;
      tau *= o.backtrack;
    }
    if (!accepted) {
      rep.line_search_failed = true;
      return finish(best_x, best_f, itr, StopReason::MaxIter);
    }

    rep.trace.push_back(fx);
    rep.max_feasibility_error = std::max(rep.max_feasibility_error, orthogonality_error(x));
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }

    d = tangent_residual(x, g);
    nrm = d.norm();
    const Matrix s = x - xp;
    const Matrix y = d - dp;
    const double xdiff = s.norm() / sqrt_rows;
    const double fdiff = std::abs(fp - fx) / (std::abs(fp) + 1.0);

    const double sy = std::abs((s.array() * y.array()).sum());
    const double ss = s.squaredNorm();
    const double yy = y.squaredNorm();
    if (sy > 0.0 && yy > 0.0) {
      tau = (itr % 2 == 0) ? ss / sy : sy / yy;
    }
    tau = std::clamp(tau, o.min_step, o.max_step);

    crit.emplace_back(xdiff, fdiff);
    if (static_cast<int>(crit.size()) > o.nonmonotone_window) crit.pop_front();
    window.push_back(fx);
    if (static_cast<int>(window.size()) > o.nonmonotone_window) window.pop_front();

    if (stationary(nrm, g)) return finish(x, fx, itr, StopReason::Gtol);
    if (xdiff < o.xtol && fdiff < o.ftol) return finish(x, fx, itr, StopReason::Xtol);
    double mx = 0.0, mf = 0.0;
    for (const auto& [cx, cf] : crit) {
      mx += cx;
      mf += cf;
    }
    mx /= static_cast<double>(crit.size());
    mf /= static_cast<double>(crit.size());
    if (mx < 10.0 * o.xtol && mf < 10.0 * o.ftol) return finish(x, fx, itr, StopReason::Ftol);
  }
  return finish(x, fx, o.max_iter, StopReason::MaxIter);
}

}  // namespace

Vector init_1d(const PhiProblem& phi) {
  const SymEigen em = eigen_sym(phi.Mk());
  const SymEigen emu = eigen_sym(SymMatrix(phi.Mk().mat() + phi.Uk().mat()));
  const Eigen::Index m = phi.dim();
  Vector best = em.vectors.col(0);
  double best_val = phi.value(best);
  for (Eigen::Index i = 1; i < 2 * m; ++i) {
    const Vector cand = i < m ? Vector(em.vectors.col(i)) : Vector(emu.vectors.col(i - m));
    const double v = phi.value(cand);
    if (v < best_val) {
      best_val = v;
      best = cand;
    }
  }
  return best;
}

Vector init_1d(const SymMatrix& mk, const SymMatrix& uk) { return init_1d(PhiProblem(mk, uk)); }

SolverReport optimize_sphere(const VectorObjective& f, const Vector& v0, const SolverOptions& opts) {
  const double len = v0.norm();
  if (v0.size() == 0 || !(len > 0.0)) {
    throw Error(ErrorCode::DimensionError, "sphere start must be a non-zero vector");
  }
  MatrixObjective wrapped = [&f](const Matrix& x, Matrix* grad) {
    Vector gv;
    const double v = f(x.col(0), grad != nullptr ? &gv : nullptr);
    if (grad != nullptr) *grad = gv;
    return v;
  };
  SolverReport rep = run_bb(wrapped, Matrix(v0 / len), opts, retract_sphere);
  rep.minimizer /= rep.minimizer.norm();
  return rep;
}

SolverReport optimize_stiefel(const MatrixObjective& f, const SemiOrthoBasis& g0,
                              const SolverOptions& opts) {
  if (g0.cols() == 0) throw Error(ErrorCode::DimensionError, "Stiefel start has no columns");
  return run_bb(f, g0.mat(), opts, retract_stiefel);
}

}  // namespace envkit
