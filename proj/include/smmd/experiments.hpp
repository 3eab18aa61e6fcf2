#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smmd/io.hpp"
#include "smmd/random.hpp"
#include "smmd/testing.hpp"
#include "smmd/types.hpp"

namespace smmd {

/// Estimators compared in the discrimination experiments.
enum class Method { AnalyticRBF, EmpiricalRBF, EmpiricalIMQ };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

/// A kernel scale s = gamma^2 / d, or the Henze-Zirkler width for (d, n).
struct Scale {
  std::string label;
  std::optional<double> value;  ///< empty for HZ

  static Scale hz() { return {"hz", std::nullopt}; }
  static Scale of(double s);
  /// Accepts "hz", fractions such as "1/8" and plain decimals.
  static Scale parse(const std::string& text);

  double gamma(std::size_t d, std::size_t n) const;
};

std::vector<Scale> parse_scales(const std::string& comma_separated);

/// Scale grid used for the RBF methods: 2, 1, 1/2, ..., 1/32, HZ.
std::vector<Scale> default_rbf_scales();
/// Scale grid used for the IMQ method: 2, 1, 1/2, ..., 1/1024.
std::vector<Scale> default_imq_scales();
std::vector<Scale> default_scales(Method method);

/// Distribution compared against N_d.
struct AlternativeSpec {
  enum class Kind { StandardNormal, UniformCube, OutlierInjected, ExternalCsv };

  Kind kind = Kind::UniformCube;
  std::size_t d = 1;
  std::size_t n = 100;
  /// OutlierInjected: the first row becomes magnitude * (1, ..., 1).
  double magnitude = 100.0;
  /// ExternalCsv: pool of rows; each batch draws n of them without replacement.
  std::shared_ptr<const Matrix> pool;

  static AlternativeSpec standard_normal(std::size_t d, std::size_t n);
  static AlternativeSpec uniform_cube(std::size_t d, std::size_t n);
  static AlternativeSpec outlier_injected(std::size_t d, std::size_t n, double magnitude);
  /// Loads `path`; optionally centers and whitens the whole pool first.
  static AlternativeSpec external_csv(const std::string& path, std::size_t n, bool whiten = false);
  static AlternativeSpec external_rows(Matrix rows, std::size_t n);

  /// Same distribution at another dimension (not valid for ExternalCsv).
  AlternativeSpec with_dim(std::size_t new_d) const;
  void validate() const;
};

std::string to_string(AlternativeSpec::Kind kind);

Sample sample_alternative(const AlternativeSpec& spec, Rng& rng);

/// Effect size between the statistic's distribution on N_d samples (group 1)
/// and on alternative samples (group 2):
/// tau = |mean1 - mean2| / ((sd1 + sd2) / 2), SDs with divisor replicates - 1.
struct TauResult {
  Method method;
  std::string scale_label;
  double scale;
  double gamma;
  std::size_t d;
  std::size_t n;
  double tau;
  double mean1;
  double sd1;
  double mean2;
  double sd2;
  std::size_t replicates;
  std::vector<double> values1;
  std::vector<double> values2;
};

/// Cohen's d style separation of two groups of replicate values.
double effect_size(std::span<const double> group1, std::span<const double> group2);

struct MethodScales {
  Method method;
  std::vector<Scale> scales;
};

/// Runs every (method, scale) cell for one dimension on shared replicate
/// samples: replicate r draws its N_d batch from substream(seed, {d, r, 0}),
/// its alternative batch from {d, r, 1}, and the empirical methods' N_d
/// reference batches from {d, r, 2} and {d, r, 3}.
std::vector<TauResult> tau_cells(std::span<const MethodScales> grid, const AlternativeSpec& alternative,
                                 std::size_t replicates, std::uint64_t seed);

TauResult tau(Method method, const AlternativeSpec& alternative, const Scale& scale, std::size_t replicates,
              std::uint64_t seed);

/// tau_cells over several dimensions (the alternative is re-dimensioned).
std::vector<TauResult> tau_grid(std::span<const MethodScales> grid, const AlternativeSpec& alternative,
                                std::span<const std::size_t> dims, std::size_t replicates, std::uint64_t seed);

Table tau_table(std::span<const TauResult> results);

struct NullSummary {
  std::size_t d;
  std::string scale_label;
  double scale;
  double gamma;
  double mean;
  double sd;
  std::size_t replicates;
};

/// Mean and SD of SMMD over null replicates for each (d, scale).
std::vector<NullSummary> validate_null(std::span<const std::size_t> dims, std::span<const Scale> scales,
                                       std::size_t n, std::size_t replicates, std::uint64_t seed);
Table validation_table(std::span<const NullSummary> rows);

struct ThresholdRow {
  std::size_t d;
  SampleType sample_type;
  std::string scale_label;
  double scale;
  double gamma;
  double alpha;
  double threshold;
  std::size_t replicates;
};

/// alpha-level SMMD thresholds per (d, sample type, scale). All scales for
/// one (d, sample type) share the replicate samples of simulate_null.
std::vector<ThresholdRow> threshold_table(std::span<const std::size_t> dims, std::span<const Scale> scales,
                                          std::span<const SampleType> sample_types, std::size_t n, double alpha,
                                          std::size_t replicates, std::uint64_t seed);
Table thresholds_to_table(std::span<const ThresholdRow> rows);

struct BoxSummary {
  double min;
  double q1;
  double median;
  double q3;
  double max;
};

BoxSummary box_summary(std::vector<double> values);

struct OutlierResult {
  /// Cell with the largest tau over the method's scales.
  TauResult best;
  BoxSummary clean;
  BoxSummary outlier;
};

/// Clean N_d batches against batches whose first point is moved to
/// magnitude * (1, ..., 1); per method, the scale with maximal tau is kept.
std::vector<OutlierResult> outlier_experiment(std::span<const MethodScales> grid, std::size_t d, std::size_t n,
                                              double magnitude, std::size_t replicates, std::uint64_t seed);
Table outlier_table(std::span<const OutlierResult> rows);

struct DeltaStudy {
  double mean_delta;
  double sd_delta;
  /// (sd of mmd_u on clean samples + sd on modified samples) / 2
  double pooled_sd;
  std::size_t replicates;
};

/// Paired study of outlier_delta on null samples with the first point moved
/// to magnitude * (1, ..., 1).
DeltaStudy outlier_delta_study(std::size_t d, std::size_t n, double magnitude, double gamma, std::size_t replicates,
                               std::uint64_t seed);

}  // namespace smmd
