#include "smmd/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "smmd/kernels.hpp"

namespace smmd {

namespace {

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("kernel width gamma must be positive and finite");
  }
}

// log of sum_i exp(-|z_i - m|^2 / (2 h^2)), shifted by the largest exponent.
double log_kde(const Matrix& z, const Vector& m, double two_h_sq) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> expo(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double e = -(z.row(i).transpose() - m).squaredNorm() / two_h_sq;
    expo[static_cast<std::size_t>(i)] = e;
    best = std::max(best, e);
  }
  double acc = 0.0;
  for (double e : expo) acc += std::exp(e - best);
  return best + std::log(acc);
}

// Mean-shift ascent of the Gaussian density estimate from `start`.
Vector mean_shift(const Matrix& z, Vector m, double two_h_sq) {
  std::vector<double> expo(static_cast<std::size_t>(z.rows()));
  for (int iter = 0; iter < 1000; ++iter) {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double e = -(z.row(i).transpose() - m).squaredNorm() / two_h_sq;
      expo[static_cast<std::size_t>(i)] = e;
      best = std::max(best, e);
    }
    Vector next = Vector::Zero(z.cols());
    double wsum = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double w = std::exp(expo[static_cast<std::size_t>(i)] - best);
      next += w * z.row(i).transpose();
      wsum += w;
    }
    next /= wsum;
    const double step = (next - m).norm();
    m = std::move(next);
    if (step < 1e-10) break;
  }
  return m;
}

}  // namespace

SampleGeometry geometry(const Sample& sample) {
  const Matrix& z = sample.data();
  SampleGeometry g;
  g.n = sample.size();
  g.d = sample.dim();
  g.sq_norms.resize(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < g.d; ++k) {
      const double v = z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      acc += v * v;
    }
    g.sq_norms[i] = acc;
  }
  g.pair_sq.reserve(g.n * (g.n - 1) / 2);
  for (std::size_t i = 0; i < g.n; ++i) {
    const auto zi = row_span(z, static_cast<Eigen::Index>(i));
    for (std::size_t j = i + 1; j < g.n; ++j) {
      g.pair_sq.push_back(sq_dist(zi, row_span(z, static_cast<Eigen::Index>(j))));
    }
  }
  return g;
}

double width_ratio_pow(double gamma, double c, double power) {
  return std::exp(-power * std::log1p(c / (gamma * gamma)));
}

ClosedFormTerms closed_form_terms(const SampleGeometry& geom, double gamma) {
  require_gamma(gamma);
  const double g2 = gamma * gamma;
  const double half_d = 0.5 * static_cast<double>(geom.d);
  const double n = static_cast<double>(geom.n);

  ClosedFormTerms t;
  t.reference = width_ratio_pow(gamma, 2.0, half_d);

  const double cross_denom = 2.0 * (1.0 + g2);
  double cross_sum = 0.0;
  for (double r2 : geom.sq_norms) cross_sum += std::exp(-r2 / cross_denom);
  t.cross = (2.0 / n) * width_ratio_pow(gamma, 1.0, half_d) * cross_sum;

  const double pair_denom = 2.0 * g2;
  double pair_sum = 0.0;
  for (double r2 : geom.pair_sq) pair_sum += std::exp(-r2 / pair_denom);
  t.offdiag_sum = 2.0 * pair_sum;
  return t;
}

double mmd_u_closed(const SampleGeometry& geom, double gamma) {
  if (geom.n < 2) throw std::invalid_argument("unbiased estimator requires n >= 2");
  const ClosedFormTerms t = closed_form_terms(geom, gamma);
  const double n = static_cast<double>(geom.n);
  return t.reference - t.cross + t.offdiag_sum / (n * (n - 1.0));
}

double mmd_u_closed(const Sample& sample, double gamma) {
  if (sample.size() < 2) throw std::invalid_argument("unbiased estimator requires n >= 2");
  require_gamma(gamma);
  return mmd_u_closed(geometry(sample), gamma);
}

double mmd_b_closed(const SampleGeometry& geom, double gamma) {
  const ClosedFormTerms t = closed_form_terms(geom, gamma);
  const double n = static_cast<double>(geom.n);
  return t.reference - t.cross + (t.offdiag_sum + n) / (n * n);
}

double mmd_b_closed(const Sample& sample, double gamma) {
  require_gamma(gamma);
  return mmd_b_closed(geometry(sample), gamma);
}

double null_variance(double gamma, std::size_t d, std::size_t n) {
  require_gamma(gamma);
  if (n < 2) throw std::invalid_argument("null variance requires n >= 2");
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  const double g2 = gamma * gamma;
  const double dd = static_cast<double>(d);
  // Each bracket term is exp(a) with a -> 0 as gamma grows; expm1 keeps the
  // near-cancelling sum accurate for wide kernels.
  const double a1 = -dd * std::log1p(2.0 / g2);
  const double a2 = -0.5 * dd * std::log1p(4.0 / g2);
  const double a3 = -0.5 * dd * (std::log1p(1.0 / g2) + std::log1p(3.0 / g2));
  const double bracket = std::expm1(a1) + std::expm1(a2) - 2.0 * std::expm1(a3);
  const double nn = static_cast<double>(n);
  return 2.0 / (nn * (nn - 1.0)) * bracket;
}

double smmd(const SampleGeometry& geom, double gamma) {
  return mmd_u_closed(geom, gamma) / std::sqrt(null_variance(gamma, geom.d, geom.n));
}

double smmd(const Sample& sample, double gamma) {
  if (sample.size() < 2) throw std::invalid_argument("unbiased estimator requires n >= 2");
  require_gamma(gamma);
  return smmd(geometry(sample), gamma);
}

double mmd_u_random_diagonal(const RandomCodes& codes, double gamma) {
  require_gamma(gamma);
  const Matrix& mu = codes.means();
  const Matrix& sd = codes.sds();
  const Eigen::Index n = mu.rows();
  const Eigen::Index d = mu.cols();
  const double g2 = gamma * gamma;

  double cross_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double log_term = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const double s2 = sd(i, k) * sd(i, k);
      log_term += -0.5 * std::log1p((1.0 + s2) / g2) - mu(i, k) * mu(i, k) / (2.0 * (1.0 + g2 + s2));
    }
    cross_sum += std::exp(log_term);
  }

  double pair_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double log_term = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double v = sd(i, k) * sd(i, k) + sd(j, k) * sd(j, k);
        const double diff = mu(i, k) - mu(j, k);
        log_term += -0.5 * std::log1p(v / g2) - diff * diff / (2.0 * (g2 + v));
      }
      pair_sum += std::exp(log_term);
    }
  }

  const double nn = static_cast<double>(n);
  return width_ratio_pow(gamma, 2.0, 0.5 * static_cast<double>(d)) - (2.0 / nn) * cross_sum +
         pair_sum / (nn * nn);
}

double mmd_u_random_isotropic(const Matrix& means, const Vector& row_sds, double gamma) {
  require_gamma(gamma);
  if (means.rows() < 1 || means.cols() < 1) throw std::invalid_argument("empty random codes");
  if (row_sds.size() != means.rows()) {
    throw std::invalid_argument("need one standard deviation per row");
  }
  if ((row_sds.array() < 0.0).any()) throw std::invalid_argument("standard deviations must be nonnegative");
  const Eigen::Index n = means.rows();
  const double half_d = 0.5 * static_cast<double>(means.cols());
  const double g2 = gamma * gamma;

  double cross_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s2 = row_sds(i) * row_sds(i);
    const double r2 = means.row(i).squaredNorm();
    cross_sum += std::exp(-half_d * std::log1p((1.0 + s2) / g2) - r2 / (2.0 * (1.0 + g2 + s2)));
  }

  double pair_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = row_sds(i) * row_sds(i) + row_sds(j) * row_sds(j);
      const double r2 = sq_dist(row_span(means, i), row_span(means, j));
      pair_sum += std::exp(-half_d * std::log1p(v / g2) - r2 / (2.0 * (g2 + v)));
    }
  }

  const double nn = static_cast<double>(n);
  return width_ratio_pow(gamma, 2.0, half_d) - (2.0 / nn) * cross_sum + pair_sum / (nn * nn);
}

double mmd_u_random(const RandomCodes& codes, double gamma) {
  if (codes.isotropic()) return mmd_u_random_isotropic(codes.means(), codes.sds().col(0), gamma);
  return mmd_u_random_diagonal(codes, gamma);
}

TwoSampleGeometry two_sample_geometry(const Sample& sample_q, const Sample& sample_p) {
  if (sample_q.dim() != sample_p.dim()) throw std::invalid_argument("samples differ in dimension");
  if (sample_q.size() != sample_p.size()) {
    throw std::invalid_argument("empirical estimator requires equal sample sizes");
  }
  if (sample_q.size() < 2) throw std::invalid_argument("unbiased estimator requires n >= 2");
  TwoSampleGeometry g;
  g.q = geometry(sample_q);
  g.p = geometry(sample_p);
  const Matrix& q = sample_q.data();
  const Matrix& p = sample_p.data();
  g.cross_sq.reserve(sample_q.size() * sample_p.size());
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.rows(); ++j) g.cross_sq.push_back(sq_dist(row_span(q, i), row_span(p, j)));
  }
  return g;
}

double mmd_u_empirical(const TwoSampleGeometry& geom, const KernelSpec& kernel) {
  const KernelFamily fam = kernel.family();
  const double two_g2 = 2.0 * kernel.gamma() * kernel.gamma();
  const double n = static_cast<double>(geom.q.n);

  double pp = 0.0;
  for (double r2 : geom.p.pair_sq) pp += kernel_from_sq_dist(fam, r2, two_g2);
  double qq = 0.0;
  for (double r2 : geom.q.pair_sq) qq += kernel_from_sq_dist(fam, r2, two_g2);
  double pq = 0.0;
  for (double r2 : geom.cross_sq) pq += kernel_from_sq_dist(fam, r2, two_g2);

  const double u = n * (n - 1.0);
  return 2.0 * pp / u - 2.0 * pq / (n * n) + 2.0 * qq / u;
}

double mmd_u_empirical(const Sample& sample_q, const Sample& sample_p, const KernelSpec& kernel) {
  return mmd_u_empirical(two_sample_geometry(sample_q, sample_p), kernel);
}

double hz_gamma(std::size_t d, std::size_t n) {
  if (d == 0 || n == 0) throw std::invalid_argument("hz_gamma requires d >= 1 and n >= 1");
  const double dd = static_cast<double>(d);
  const double base = (2.0 * dd + 1.0) * static_cast<double>(n) / 4.0;
  return std::sqrt(2.0) * std::pow(base, -1.0 / (dd + 4.0));
}

double outlier_delta(const Sample& sample, std::size_t index, const Vector& replacement, double gamma) {
  if (index >= sample.size()) throw std::out_of_range("outlier index out of range");
  if (static_cast<std::size_t>(replacement.size()) != sample.dim()) {
    throw std::invalid_argument("replacement point has the wrong dimension");
  }
  Matrix modified = sample.data();
  modified.row(static_cast<Eigen::Index>(index)) = replacement.transpose();
  return mmd_u_closed(Sample(std::move(modified)), gamma) - mmd_u_closed(sample, gamma);
}

double translation_objective(const Sample& sample, const Vector& shift, double gamma) {
  require_gamma(gamma);
  const double two_h_sq = 2.0 * (1.0 + gamma * gamma);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sample.data().rows(); ++i) {
    acc += std::exp(-(sample.data().row(i).transpose() + shift).squaredNorm() / two_h_sq);
  }
  return acc;
}

Vector optimal_translation(const Sample& sample, double gamma) {
  require_gamma(gamma);
  const Matrix& z = sample.data();
  const double two_h_sq = 2.0 * (1.0 + gamma * gamma);

  std::vector<Vector> starts;
  starts.reserve(sample.size() + 2);
  for (Eigen::Index i = 0; i < z.rows(); ++i) starts.emplace_back(z.row(i).transpose());
  starts.emplace_back(z.colwise().mean().transpose());
  starts.emplace_back(Vector::Zero(z.cols()));

  Vector best_mode;
  double best_value = -std::numeric_limits<double>::infinity();
  for (const Vector& start : starts) {
    Vector mode = mean_shift(z, start, two_h_sq);
    const double value = log_kde(z, mode, two_h_sq);
    if (value > best_value) {
      best_value = value;
      best_mode = std::move(mode);
    }
  }
  return -best_mode;
}

}  // namespace smmd
