#pragma once

#include <cstddef>
#include <string>
#include <utility>

namespace smmd {

/// Where a running statistic sits relative to its three-sigma interval.
enum class ConvergenceFlag { Inside, Outside, InsufficientData };

std::string to_string(ConvergenceFlag flag);

using Interval = std::pair<double, double>;

/// (-3/sqrt(m), 3/sqrt(m))
Interval b_interval(std::size_t m);

/// (-3 sqrt((1-alpha)/(1+alpha)), +3 sqrt((1-alpha)/(1+alpha)))
Interval e_interval(double alpha);

/// Simple average of per-batch SMMD values. Under the null it is
/// approximately N(0, 1/m).
class BMonitor {
 public:
  /// Fewer batches than this report InsufficientData.
  static constexpr std::size_t kMinBatches = 30;

  std::size_t count() const { return count_; }
  double sum() const { return sum_; }
  /// Requires count() >= 1.
  double statistic() const;
  Interval interval() const { return b_interval(count_); }
  ConvergenceFlag flag() const;

  friend BMonitor b_update(BMonitor monitor, double smmd_value);

 private:
  std::size_t count_ = 0;
  double sum_ = 0.0;
};

BMonitor b_update(BMonitor monitor, double smmd_value);

/// Exponential moving average E_b = alpha E_{b-1} + (1 - alpha) S_b with E_0 = 0.
class EMonitor {
 public:
  explicit EMonitor(double alpha);

  double alpha() const { return alpha_; }
  std::size_t count() const { return count_; }
  double statistic() const { return value_; }
  Interval interval() const { return e_interval(alpha_); }
  /// InsufficientData until about one effective window, 1 / (1 - alpha)
  /// batches, has been seen.
  ConvergenceFlag flag() const;

  friend EMonitor e_update(EMonitor monitor, double smmd_value);

 private:
  double alpha_;
  std::size_t count_ = 0;
  double value_ = 0.0;
};

EMonitor e_update(EMonitor monitor, double smmd_value);

}  // namespace smmd
