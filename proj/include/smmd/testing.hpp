#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smmd/types.hpp"

namespace smmd {

/// Processing applied to each null replicate before the statistic is taken.
enum class SampleType { Original, CenteredScaled, CenteredWhitened };

std::string to_string(SampleType type);
SampleType sample_type_from_string(const std::string& name);

/// Which normality hypothesis a test checks.
enum class Composite {
  SimpleStandard,  ///< N(0, I) exactly
  DiagonalCov,     ///< N(mu, diag) with unknown mu and diagonal covariance
  FullCov,         ///< N(mu, Sigma) with unknown mu and full-rank Sigma
};

std::string to_string(Composite composite);
Composite composite_from_string(const std::string& name);
SampleType null_sample_type(Composite composite);

/// Applies the transform a sample type names (identity for Original).
Sample apply_sample_type(const Sample& sample, SampleType type);

struct NullSpec {
  std::size_t d = 1;
  std::size_t n = 100;
  KernelSpec kernel{KernelFamily::RBF, 1.0};
  SampleType sample_type = SampleType::Original;
  std::size_t replicates = 10000;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on an unusable combination.
  void validate() const;

  /// Same null distribution apart from replicate count and seed.
  bool same_distribution(const NullSpec& other) const;

  bool operator==(const NullSpec&) const = default;
};

class NullDistribution {
 public:
  NullDistribution(NullSpec spec, std::vector<double> values, std::size_t redraws = 0);

  const NullSpec& spec() const { return spec_; }
  /// Replicate statistics in ascending order.
  const std::vector<double>& values() const { return values_; }
  /// Replicates that had to be redrawn because whitening failed.
  std::size_t redraws() const { return redraws_; }

  double threshold(double alpha) const;

 private:
  NullSpec spec_;
  std::vector<double> values_;
  std::size_t redraws_;
};

/// Empirical quantile at probability p with linear interpolation between
/// order statistics: h = (N - 1) p, x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
double empirical_quantile(std::span<const double> sorted, double p);

/// Upper (1 - alpha) quantile of the null distribution.
double threshold(const NullDistribution& dist, double alpha);

/// Monte-Carlo null distribution of SMMD for the given spec. Replicate r is
/// drawn from substream(seed, {r, attempt}); results do not depend on the
/// number of worker threads.
NullDistribution simulate_null(const NullSpec& spec);

/// simulate_null for several kernel widths sharing one set of replicate
/// samples. Entry i equals simulate_null with gamma = gammas[i] bit for bit.
std::vector<NullDistribution> simulate_null_widths(const NullSpec& base, std::span<const double> gammas);

struct TestResult {
  double statistic;
  double threshold;
  bool reject;
};

/// Transforms the sample as the hypothesis requires, computes SMMD and
/// compares it against the matching null threshold. The null distribution
/// must come from the same d, n, kernel and sample type.
TestResult test_normality(const Sample& sample, const KernelSpec& kernel, Composite composite, double alpha,
                          const NullDistribution& null_cache);

// Null-distribution cache files: one JSON header line followed by one value
// per line with 17 significant digits.

std::string artifact_version();
std::string cache_key(const NullSpec& spec);
std::filesystem::path default_cache_dir();
std::filesystem::path cache_path(const std::filesystem::path& dir, const NullSpec& spec);

void write_null_distribution(const std::filesystem::path& path, const NullDistribution& dist);
NullDistribution read_null_distribution(const std::filesystem::path& path);

/// Loads the cached distribution for `spec` from `dir`, simulating and
/// storing it when absent.
NullDistribution load_or_simulate(const NullSpec& spec, const std::filesystem::path& dir);

/// Looks for any cached distribution matching spec apart from replicates and
/// seed; prefers the most replicates, then the lexicographically first file.
std::optional<NullDistribution> find_cached(const NullSpec& spec, const std::filesystem::path& dir);

struct KsResult {
  double statistic;
  double p_value;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace smmd
