#pragma once

#include <optional>

#include "smmd/types.hpp"

namespace smmd {

struct BatchStats {
  Vector mean;
  /// Standard deviations with divisor n - 1.
  Vector per_dim_sd;
  /// Sample covariance with divisor n - 1, present when requested.
  std::optional<Matrix> covariance;
};

BatchStats batch_stats(const Sample& sample, bool with_covariance = false);

/// Per-dimension centering and scaling to unit unbiased variance. No affine
/// transform is applied afterwards.
Sample code_normalize(const Sample& sample);

/// Same transform as code_normalize, named for the composite-null procedure
/// that assumes a diagonal covariance.
Sample center_scale(const Sample& sample);

/// Normalizes the Gaussian mixture implied by a random encoder using its
/// exact mixture moments: mean_k = (1/n) sum mu_ik and
/// var_k = (1/n) sum (mu_ik^2 + sigma_ik^2) - mean_k^2.
RandomCodes code_normalize_random(const RandomCodes& codes);

/// Mixture mean and variance per dimension, as used by code_normalize_random.
std::pair<Vector, Vector> mixture_moments(const RandomCodes& codes);

/// Symmetric inverse square root of a symmetric positive definite matrix.
/// Throws NumericalError when the smallest eigenvalue is below
/// min_ratio times the largest.
Matrix inverse_sqrt_spd(const Matrix& s, double min_ratio = 1e-10);

/// Z_i = S^{-1/2} (X_i - mean) with S the unbiased sample covariance.
Sample center_whiten(const Sample& sample);

}  // namespace smmd
