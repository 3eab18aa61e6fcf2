#pragma once

// Definition-level reference implementations used only by the tests. They
// share no code with the library beyond the Matrix type.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "smmd/types.hpp"

namespace oracle {

inline double sqd(const smmd::Matrix& a, Eigen::Index i, const smmd::Matrix& b, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const double t = a(i, k) - b(j, k);
    s += t * t;
  }
  return s;
}

inline double norm2(const smmd::Matrix& a, Eigen::Index i) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * a(i, k);
  return s;
}

inline double rbf(double sq, double g) { return std::exp(-sq / (2.0 * g * g)); }
inline double imq(double sq, double g) { return 1.0 / (1.0 + sq / (2.0 * g * g)); }

/// E_{x,x' ~ N_d} k(x, x'), plain pow form.
inline double term_reference(double g, double d) { return std::pow(g * g / (2.0 + g * g), d / 2.0); }

/// (2/n) sum_i E_{x ~ N_d} k(x, z_i)
inline double term_cross(const smmd::Matrix& z, double g) {
  const double d = static_cast<double>(z.cols());
  const double n = static_cast<double>(z.rows());
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    s += std::pow(g * g / (1.0 + g * g), d / 2.0) * std::exp(-norm2(z, i) / (2.0 * (1.0 + g * g)));
  }
  return 2.0 * s / n;
}

inline double pair_sum(const smmd::Matrix& z, double g, bool diagonal) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.rows(); ++j) {
      if (i == j && !diagonal) continue;
      s += rbf(sqd(z, i, z, j), g);
    }
  }
  return s;
}

inline double mmd_u(const smmd::Matrix& z, double g) {
  const double n = static_cast<double>(z.rows());
  return term_reference(g, static_cast<double>(z.cols())) - term_cross(z, g) + pair_sum(z, g, false) / (n * (n - 1));
}

inline double mmd_b(const smmd::Matrix& z, double g) {
  const double n = static_cast<double>(z.rows());
  return term_reference(g, static_cast<double>(z.cols())) - term_cross(z, g) + pair_sum(z, g, true) / (n * n);
}

inline double variance(double g, double d, double n) {
  const double g2 = g * g;
  return 2.0 / (n * (n - 1)) *
         (std::pow(g2 / (2 + g2), d) + std::pow(g2 / (4 + g2), d / 2) -
          2 * std::pow(g2 * g2 / ((1 + g2) * (3 + g2)), d / 2));
}

/// Two-sample U-statistic with a triple loop over all index combinations.
template <class K>
double mmd_empirical(const smmd::Matrix& q, const smmd::Matrix& p, double g, K k) {
  const auto n = q.rows();
  const double nn = static_cast<double>(n);
  double pp = 0, qq = 0, pq = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      pq += k(sqd(p, i, q, j), g);
      if (i != j) {
        pp += k(sqd(p, i, p, j), g);
        qq += k(sqd(q, i, q, j), g);
      }
    }
  }
  return pp / (nn * (nn - 1)) - 2.0 * pq / (nn * nn) + qq / (nn * (nn - 1));
}

/// Random-encoder estimator in its per-coordinate product form.
inline double mmd_random(const smmd::Matrix& mu, const smmd::Matrix& sd, double g) {
  const auto n = mu.rows();
  const auto d = mu.cols();
  const double g2 = g * g;
  double cross = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double prod = 1.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const double v = 1 + g2 + sd(i, k) * sd(i, k);
      prod *= std::sqrt(g2 / v) * std::exp(-mu(i, k) * mu(i, k) / (2 * v));
    }
    cross += prod;
  }
  double pairs = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double prod = 1.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double v = g2 + sd(i, k) * sd(i, k) + sd(j, k) * sd(j, k);
        const double t = mu(i, k) - mu(j, k);
        prod *= std::sqrt(g2 / v) * std::exp(-t * t / (2 * v));
      }
      pairs += prod;
    }
  }
  const double nn = static_cast<double>(n);
  return term_reference(g, static_cast<double>(d)) - 2.0 * cross / nn + pairs / (nn * nn);
}

/// Composite Simpson rule on [a, b] with m (even) panels.
template <class F>
double simpson(F f, double a, double b, int m) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// W_{n,beta} = int |exp(-t^2/2) - Psi_n(t)|^2 phi_beta(t) dt in one dimension,
/// Psi_n the empirical characteristic function and phi_beta the N(0, beta^2) density.
inline double bhep_1d(const std::vector<double>& z, double beta) {
  const double n = static_cast<double>(z.size());
  auto integrand = [&](double t) {
    double re = 0.0, im = 0.0;
    for (double x : z) {
      re += std::cos(t * x);
      im += std::sin(t * x);
    }
    re = std::exp(-t * t / 2) - re / n;
    im = -im / n;
    const double w = std::exp(-t * t / (2 * beta * beta)) / std::sqrt(2 * std::numbers::pi * beta * beta);
    return (re * re + im * im) * w;
  };
  const double lim = 40.0 * std::max(1.0, beta);
  return simpson(integrand, -lim, lim, 200000);
}

/// Haar-random orthogonal matrix (QR of a Gaussian matrix with sign fix).
inline Eigen::MatrixXd random_orthogonal(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = nd(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR();
  for (Eigen::Index j = 0; j < d; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

inline smmd::Matrix gaussian(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  smmd::Matrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = nd(rng);
  return m;
}

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace oracle
