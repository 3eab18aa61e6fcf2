#pragma once

#include <cmath>
#include <span>

#include "smmd/types.hpp"

namespace smmd {

/// Squared Euclidean distance by direct per-coordinate summation.
double sq_dist(std::span<const double> x, std::span<const double> y);

/// e^{-|x-y|^2 / (2 gamma^2)}
double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);

/// 1 / (1 + |x-y|^2 / (2 gamma^2))
double imq_kernel(std::span<const double> x, std::span<const double> y, double gamma);

double kernel(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

/// Kernel value from a precomputed squared distance. No argument checks.
inline double kernel_from_sq_dist(KernelFamily family, double sq, double two_gamma_sq) {
  return family == KernelFamily::RBF ? std::exp(-sq / two_gamma_sq) : 1.0 / (1.0 + sq / two_gamma_sq);
}

/// D(i, j) = |z_i - z_j|^2, symmetric with a zero diagonal.
Matrix pairwise_sq_dists(const Sample& sample);

/// Squared distances between every row of `a` and every row of `b`.
Matrix cross_sq_dists(const Sample& a, const Sample& b);

inline std::span<const double> row_span(const Matrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace smmd
