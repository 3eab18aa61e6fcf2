#include "smmd/normalization.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace smmd {

BatchStats batch_stats(const Sample& sample, bool with_covariance) {
  const Matrix& x = sample.data();
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n < 2) throw std::invalid_argument("batch statistics require n >= 2");

  BatchStats stats;
  stats.mean = Vector::Zero(d);
  for (Eigen::Index i = 0; i < n; ++i) stats.mean += x.row(i).transpose();
  stats.mean /= static_cast<double>(n);

  const double denom = static_cast<double>(n - 1);
  stats.per_dim_sd.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double c = x(i, k) - stats.mean(k);
      acc += c * c;
    }
    stats.per_dim_sd(k) = std::sqrt(acc / denom);
  }

  if (with_covariance) {
    Matrix cov(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = a; b < d; ++b) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) acc += (x(i, a) - stats.mean(a)) * (x(i, b) - stats.mean(b));
        cov(a, b) = acc / denom;
        cov(b, a) = cov(a, b);
      }
    }
    stats.covariance = std::move(cov);
  }
  return stats;
}

Sample code_normalize(const Sample& sample) {
  const BatchStats stats = batch_stats(sample);
  Matrix out = sample.data();
  for (Eigen::Index k = 0; k < out.cols(); ++k) {
    if (!(stats.per_dim_sd(k) > 0.0)) {
      throw std::invalid_argument("column " + std::to_string(k) + " has zero variance");
    }
    const double inv_sd = 1.0 / stats.per_dim_sd(k);
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, k) = (out(i, k) - stats.mean(k)) * inv_sd;
  }
  return Sample(std::move(out));
}

Sample center_scale(const Sample& sample) { return code_normalize(sample); }

std::pair<Vector, Vector> mixture_moments(const RandomCodes& codes) {
  const Matrix& mu = codes.means();
  const Matrix& sd = codes.sds();
  const double n = static_cast<double>(mu.rows());
  Vector mean(mu.cols());
  Vector var(mu.cols());
  for (Eigen::Index k = 0; k < mu.cols(); ++k) {
    double m = 0.0;
    double second = 0.0;
    for (Eigen::Index i = 0; i < mu.rows(); ++i) {
      m += mu(i, k);
      second += mu(i, k) * mu(i, k) + sd(i, k) * sd(i, k);
    }
    m /= n;
    mean(k) = m;
    var(k) = second / n - m * m;
  }
  return {mean, var};
}

RandomCodes code_normalize_random(const RandomCodes& codes) {
  const auto [mean, var] = mixture_moments(codes);
  Matrix mu = codes.means();
  Matrix sd = codes.sds();
  for (Eigen::Index k = 0; k < mu.cols(); ++k) {
    if (!(var(k) > 0.0)) {
      throw std::invalid_argument("column " + std::to_string(k) + " has zero mixture variance");
    }
    const double inv_sd = 1.0 / std::sqrt(var(k));
    for (Eigen::Index i = 0; i < mu.rows(); ++i) {
      mu(i, k) = (mu(i, k) - mean(k)) * inv_sd;
      sd(i, k) *= inv_sd;
    }
  }
  return RandomCodes(std::move(mu), std::move(sd));
}

Matrix inverse_sqrt_spd(const Matrix& s, double min_ratio) {
  if (s.rows() != s.cols() || s.rows() == 0) throw std::invalid_argument("matrix must be square and non-empty");
  const Eigen::MatrixXd dense = s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Vector& lambda = eig.eigenvalues();
  const double largest = lambda.maxCoeff();
  const double smallest = lambda.minCoeff();
  if (!(largest > 0.0) || !(smallest > min_ratio * largest)) {
    std::ostringstream msg;
    msg << "covariance is near-singular (eigenvalues " << smallest << " .. " << largest;
    msg << ", condition number ";
    if (smallest > 0.0) {
      msg << largest / smallest;
    } else {
      msg << "inf";
    }
    msg << ")";
    throw NumericalError(msg.str());
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  Eigen::MatrixXd out = v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  // Symmetrize away rounding asymmetry.
  return Matrix(0.5 * (out + out.transpose()));
}

Sample center_whiten(const Sample& sample) {
  if (sample.size() < sample.dim() + 1) {
    throw std::invalid_argument("whitening requires n >= d + 1");
  }
  const BatchStats stats = batch_stats(sample, true);
  const Matrix w = inverse_sqrt_spd(*stats.covariance);
  Matrix centered = sample.data();
  centered.rowwise() -= stats.mean.transpose();
  // Rows are points, so Z = C W with W symmetric.
  return Sample(Matrix(centered * w));
}

}  // namespace smmd
