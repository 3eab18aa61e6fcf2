#pragma once

#include <cstddef>
#include <vector>

#include "smmd/types.hpp"

namespace smmd {

enum class EstimatorKind {
  ClosedFormUnbiased,
  ClosedFormBiased,
  RandomEncoder,
  EmpiricalUnbiasedRBF,
  EmpiricalUnbiasedIMQ,
};

struct MmdEstimate {
  double value;
  EstimatorKind kind;
  KernelSpec kernel;
  std::size_t n;
  std::size_t d;
};

/// Squared norms and packed pairwise squared distances of a sample. Every
/// closed-form estimator is evaluated from this, so a sample's geometry can be
/// computed once and reused across kernel widths with identical results.
struct SampleGeometry {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> sq_norms;
  /// |z_i - z_j|^2 for i < j, row by row.
  std::vector<double> pair_sq;
};

SampleGeometry geometry(const Sample& sample);

/// The three pieces of the closed-form estimators against N_d.
struct ClosedFormTerms {
  /// E_{x,x'~N_d} k(x,x') = (gamma^2 / (2 + gamma^2))^{d/2}
  double reference = 0.0;
  /// (2/n) sum_i E_{x~N_d} k(x, z_i)
  double cross = 0.0;
  /// sum_{i != j} k(z_i, z_j)
  double offdiag_sum = 0.0;
};

ClosedFormTerms closed_form_terms(const SampleGeometry& geom, double gamma);

/// (gamma^2 / (c + gamma^2))^{power}, evaluated in log space.
double width_ratio_pow(double gamma, double c, double power);

double mmd_u_closed(const SampleGeometry& geom, double gamma);
double mmd_u_closed(const Sample& sample, double gamma);

double mmd_b_closed(const SampleGeometry& geom, double gamma);
double mmd_b_closed(const Sample& sample, double gamma);

/// Variance of the unbiased closed-form estimator when the sample is drawn
/// from N_d.
double null_variance(double gamma, std::size_t d, std::size_t n);

/// Unbiased estimate divided by its null standard deviation.
double smmd(const SampleGeometry& geom, double gamma);
double smmd(const Sample& sample, double gamma);

/// Closed-form MMD between N_d and the equal-weight Gaussian mixture of a
/// random encoder. The pair term averages over all (i, j), so zero variances
/// give mmd_b_closed of the means. Dispatches to the isotropic form when
/// every row shares one standard deviation.
double mmd_u_random(const RandomCodes& codes, double gamma);
double mmd_u_random_diagonal(const RandomCodes& codes, double gamma);
double mmd_u_random_isotropic(const Matrix& means, const Vector& row_sds, double gamma);

/// Pairwise geometry of two equal-sized samples, reused across kernels.
struct TwoSampleGeometry {
  SampleGeometry q;
  SampleGeometry p;
  /// |q_i - p_j|^2, row-major n x n.
  std::vector<double> cross_sq;
};

TwoSampleGeometry two_sample_geometry(const Sample& sample_q, const Sample& sample_p);

/// Standard two-sample unbiased estimator with kernel sums computed from data.
double mmd_u_empirical(const TwoSampleGeometry& geom, const KernelSpec& kernel);
double mmd_u_empirical(const Sample& sample_q, const Sample& sample_p, const KernelSpec& kernel);

/// Henze-Zirkler kernel width sqrt(2) ((2d + 1) n / 4)^{-1/(d + 4)}.
double hz_gamma(std::size_t d, std::size_t n);

/// Change in mmd_u_closed when row `index` is replaced, by two full evaluations.
double outlier_delta(const Sample& sample, std::size_t index, const Vector& replacement, double gamma);

/// Translation t minimizing mmd_u_closed(sample + t). Only the cross term
/// depends on t; it is a kernel density estimate of bandwidth^2 = 1 + gamma^2
/// evaluated at -t, so the optimum moves the density's highest mode to the
/// origin. Located by mean-shift from every point, plus the centroid and the
/// origin.
Vector optimal_translation(const Sample& sample, double gamma);

/// Value proportional to the density estimate used by optimal_translation.
double translation_objective(const Sample& sample, const Vector& shift, double gamma);

}  // namespace smmd
