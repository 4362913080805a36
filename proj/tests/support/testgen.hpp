#pragma once

// Seeded generators for property tests. splitmix64 drives everything so the
// test inputs do not depend on the library RNG under test.

#include <cmath>
#include <cstdint>
#include <vector>

#include "envkit/glm.hpp"
#include "envkit/linalg.hpp"
#include "envkit/objectives.hpp"

namespace testgen {

using envkit::Matrix;
using envkit::Vector;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : s_(seed * 0x9E3779B97F4A7C15ull + 1) {}

  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  double normal() {
    // Box-Muller; one value per call keeps the stream easy to reason about.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * uniform());
  }

  Matrix normal_matrix(Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }
  Vector normal_vector(Eigen::Index n) { return normal_matrix(n, 1).col(0); }

  Vector unit_vector(Eigen::Index n) {
    Vector v = normal_vector(n);
    return v / v.norm();
  }

  Matrix orthonormal(Eigen::Index p, Eigen::Index k) {
    Eigen::HouseholderQR<Matrix> qr(normal_matrix(p, p));
    Matrix q = qr.householderQ() * Matrix::Identity(p, p);
    return q.leftCols(k);
  }

  Matrix symmetric(Eigen::Index p) {
    Matrix a = normal_matrix(p, p);
    return (a + a.transpose()) / 2.0;
  }

  /// Eigenvalues drawn from [lo, hi].
  Matrix spd(Eigen::Index p, double lo = 0.5, double hi = 5.0) {
    const Matrix q = orthonormal(p, p);
    Vector d(p);
    for (Eigen::Index i = 0; i < p; ++i) d(i) = uniform(lo, hi);
    return q * d.asDiagonal() * q.transpose();
  }

  Matrix psd_rank(Eigen::Index p, Eigen::Index r) {
    const Matrix a = normal_matrix(p, r);
    return a * a.transpose();
  }

 private:
  std::uint64_t s_;
};

/// M = G Omega G^T + G0 Omega0 G0^T, U = G eta eta^T G^T with the envelope
/// span(G) of dimension u. Omega is drawn from [om_lo, om_hi] and Omega0 from
/// [om0_lo, om0_hi]; the defaults keep the two spectra apart so the envelope
/// is well conditioned.
struct Structured {
  Matrix gamma, gamma0;
  envkit::MomentPair mp;
  Vector theta;
};

inline Structured structured_pair(Gen& g, Eigen::Index p, Eigen::Index u, std::size_t n = 100,
                                  double om_lo = 2.0, double om_hi = 6.0, double om0_lo = 0.2,
                                  double om0_hi = 1.2) {
  const Matrix q = g.orthonormal(p, p);
  Structured s;
  s.gamma = q.leftCols(u);
  s.gamma0 = q.rightCols(p - u);
  Vector om(u), om0(p - u);
  for (Eigen::Index i = 0; i < u; ++i) om(i) = g.uniform(om_lo, om_hi);
  for (Eigen::Index i = 0; i < p - u; ++i) om0(i) = g.uniform(om0_lo, om0_hi);
  const Vector eta = g.normal_vector(u) * 2.0;
  const Matrix m = s.gamma * om.asDiagonal() * s.gamma.transpose() +
                   s.gamma0 * om0.asDiagonal() * s.gamma0.transpose();
  const Matrix uu = s.gamma * eta * eta.transpose() * s.gamma.transpose();
  s.mp = envkit::MomentPair(envkit::SymMatrix(m), envkit::SymMatrix(uu), n);
  s.theta = s.gamma * eta;
  return s;
}

inline envkit::Dataset logistic_toy(std::uint64_t seed, Eigen::Index n, Eigen::Index p) {
  Gen g(seed);
  envkit::Dataset ds;
  ds.family = envkit::Family::Logistic;
  ds.X = g.normal_matrix(n, p);
  Vector beta = Vector::Zero(p);
  beta(0) = 1.0;
  if (p > 1) beta(1) = -0.5;
  ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = ds.X.row(i).dot(beta);
    ds.y(i) = g.uniform() < 1.0 / (1.0 + std::exp(-t)) ? 1.0 : 0.0;
  }
  return ds;
}

inline envkit::Dataset poisson_toy(std::uint64_t seed, Eigen::Index n, Eigen::Index p) {
  Gen g(seed);
  envkit::Dataset ds;
  ds.family = envkit::Family::Poisson;
  ds.X = g.normal_matrix(n, p) * 0.5;
  Vector beta = Vector::Zero(p);
  beta(0) = 0.6;
  if (p > 1) beta(1) = 0.3;
  ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lambda = std::exp(ds.X.row(i).dot(beta));
    // Knuth's multiplication method; rates here are small.
    double prod = g.uniform();
    int k = 0;
    const double limit = std::exp(-lambda);
    while (prod > limit) {
      prod *= g.uniform();
      ++k;
    }
    ds.y(i) = k;
  }
  return ds;
}

}  // namespace testgen
