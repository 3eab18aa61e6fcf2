#include "smmd/kernels.hpp"

#include <stdexcept>

namespace smmd {

namespace {

void check_args(std::span<const double> x, std::span<const double> y, double gamma) {
  if (x.size() != y.size()) throw std::invalid_argument("kernel arguments differ in dimension");
  if (!(gamma > 0.0)) throw std::invalid_argument("kernel width gamma must be positive");
}

}  // namespace

double sq_dist(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - y[k];
    acc += diff * diff;
  }
  return acc;
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
  check_args(x, y, gamma);
  return std::exp(-sq_dist(x, y) / (2.0 * gamma * gamma));
}

double imq_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
  check_args(x, y, gamma);
  return 1.0 / (1.0 + sq_dist(x, y) / (2.0 * gamma * gamma));
}

double kernel(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  return spec.family() == KernelFamily::RBF ? rbf_kernel(x, y, spec.gamma())
                                            : imq_kernel(x, y, spec.gamma());
}

Matrix pairwise_sq_dists(const Sample& sample) {
  const Matrix& z = sample.data();
  const Eigen::Index n = z.rows();
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = sq_dist(row_span(z, i), row_span(z, j));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Matrix cross_sq_dists(const Sample& a, const Sample& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("samples differ in dimension");
  const Matrix& x = a.data();
  const Matrix& y = b.data();
  Matrix out(x.rows(), y.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < y.rows(); ++j) out(i, j) = sq_dist(row_span(x, i), row_span(y, j));
  }
  return out;
}

}  // namespace smmd
