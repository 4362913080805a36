#include "envkit/envelope.hpp"

#include <string>

#include "envkit/error.hpp"

namespace envkit {

std::string_view to_string(Method m) { return m == Method::OneD ? "1d" : "fg"; }

Vector EnvelopePath::estimator(int k) const {
  if (k < 0 || k > dim()) {
    throw Error(ErrorCode::DimensionError, "no path entry for k=" + std::to_string(k));
  }
  if (k == 0) return Vector::Zero(dim());
  return at(k).theta_k;
}

Vector project_estimator(const SemiOrthoBasis& basis, const Vector& theta_tilde) {
  if (basis.rows() != theta_tilde.size()) {
    throw Error(ErrorCode::DimensionError, "basis rows do not match estimator length");
  }
  return basis.mat() * (basis.mat().transpose() * theta_tilde);
}

namespace {

PathEntry make_entry(int k, const Matrix& basis, std::vector<double> phi, const MomentPair& mp,
                     const Vector& theta_tilde) {
  PathEntry e;
  e.k = k;
  e.basis = SemiOrthoBasis(basis);
  e.phi_values = std::move(phi);
  e.j_value = k == mp.dim() ? mp.full_dimension_value() : j_value_grad(basis, mp, nullptr);
  e.theta_k = k == mp.dim() ? theta_tilde : project_estimator(e.basis, theta_tilde);
  return e;
}

void check_inputs(const MomentPair& mp, const Vector& theta_tilde) {
  if (theta_tilde.size() != mp.dim()) {
    throw Error(ErrorCode::DimensionError, "estimator length does not match moment dimension");
  }
}

}  // namespace

EnvelopePath fit_1d_path(const MomentPair& mp, const Vector& theta_tilde,
                         const SolverOptions& opts) {
  check_inputs(mp, theta_tilde);
  const Eigen::Index p = mp.dim();
  Matrix dirs(p, p);
  Matrix comp = Matrix::Identity(p, p);  // columns span the not-yet-extracted space
  std::vector<double> phi;
  phi.reserve(static_cast<std::size_t>(p));
  EnvelopePath path{{}, theta_tilde, mp, Method::OneD};

  for (Eigen::Index k = 0; k < p; ++k) {
    const SymMatrix mk(comp.transpose() * mp.M().mat() * comp);
    const SymMatrix uk(comp.transpose() * mp.U().mat() * comp);
    Vector v;
    double value;
    try {
      const PhiProblem prob(mk, uk);
      if (prob.dim() == 1) {
        v = Vector::Ones(1);
        value = prob.value(v);
      } else {
        const SolverReport rep = optimize_sphere(
            [&prob](const Vector& x, Vector* g) { return prob.value_grad(x, g); }, init_1d(prob),
            opts);
        v = rep.minimizer.col(0);
        value = rep.objective;
      }
    } catch (const Error& e) {
      throw Error(e.code(), "1D step " + std::to_string(k + 1) + ": " + e.what());
    }
    Vector dir = comp * v;
    dir.normalize();
    Matrix col = dir;
    canonicalize_signs(col);
    dirs.col(k) = col.col(0);
    phi.push_back(value);

    if (k + 1 < p) {
      comp = orthonormal_complement(SemiOrthoBasis::from_columns(dirs.leftCols(k + 1))).mat();
    }
  }

  // The extracted directions are orthonormal up to rounding; re-orthonormalize
  // the full set once so every prefix passes the basis invariant.
  Matrix q = SemiOrthoBasis::from_columns(dirs).mat();
  canonicalize_signs(q);
  for (Eigen::Index k = 1; k <= p; ++k) {
    std::vector<double> prefix(phi.begin(), phi.begin() + k);
    path.entries.push_back(
        make_entry(static_cast<int>(k), q.leftCols(k), std::move(prefix), mp, theta_tilde));
  }
  return path;
}

EnvelopePath fit_fg_path(const MomentPair& mp, const Vector& theta_tilde, const SolverOptions& opts,
                         const EnvelopePath& warm_start) {
  check_inputs(mp, theta_tilde);
  const Eigen::Index p = mp.dim();
  if (warm_start.method != Method::OneD || warm_start.dim() != p ||
      static_cast<Eigen::Index>(warm_start.entries.size()) != p) {
    throw Error(ErrorCode::DimensionError, "FG warm start must be a complete 1D path");
  }
  EnvelopePath path{{}, theta_tilde, mp, Method::FG};
  const MatrixObjective obj = [&mp](const Matrix& g, Matrix* grad) {
    return j_value_grad(g, mp, grad);
  };
  for (Eigen::Index k = 1; k <= p; ++k) {
    const PathEntry& warm = warm_start.at(static_cast<int>(k));
    Matrix basis = warm.basis.mat();
    if (k < p) {
      try {
        const SolverReport rep = optimize_stiefel(obj, warm.basis, opts);
        if (rep.objective < warm.j_value) {
          basis = SemiOrthoBasis::from_columns(rep.minimizer).mat();
          canonicalize_signs(basis);
        }
      } catch (const Error& e) {
        throw Error(e.code(), "FG dimension " + std::to_string(k) + ": " + e.what());
      }
    }
    PathEntry e = make_entry(static_cast<int>(k), basis, {}, mp, theta_tilde);
    if (e.j_value > warm.j_value) {
      e = make_entry(static_cast<int>(k), warm.basis.mat(), {}, mp, theta_tilde);
    }
    path.entries.push_back(std::move(e));
  }
  return path;
}

EnvelopePath fit_path(const MomentPair& mp, const Vector& theta_tilde, Method method,
                      const SolverOptions& opts) {
  EnvelopePath one_d = fit_1d_path(mp, theta_tilde, opts);
  if (method == Method::OneD) return one_d;
  return fit_fg_path(mp, theta_tilde, opts, one_d);
}

}  // namespace envkit
