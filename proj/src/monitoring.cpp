#include "smmd/monitoring.hpp"

#include <cmath>
#include <stdexcept>

namespace smmd {

namespace {

void require_finite(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("monitor input must be finite");
}

ConvergenceFlag classify(double value, Interval iv) {
  return (value >= iv.first && value <= iv.second) ? ConvergenceFlag::Inside : ConvergenceFlag::Outside;
}

}  // namespace

std::string to_string(ConvergenceFlag flag) {
  switch (flag) {
    case ConvergenceFlag::Inside:
      return "inside";
    case ConvergenceFlag::Outside:
      return "outside";
    case ConvergenceFlag::InsufficientData:
      return "insufficient_data";
  }
  return "unknown";
}

Interval b_interval(std::size_t m) {
  if (m < 1) throw std::invalid_argument("B interval needs at least one batch");
  const double half = 3.0 / std::sqrt(static_cast<double>(m));
  return {-half, half};
}

Interval e_interval(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("momentum must lie in (0, 1)");
  const double half = 3.0 * std::sqrt((1.0 - alpha) / (1.0 + alpha));
  return {-half, half};
}

double BMonitor::statistic() const {
  if (count_ == 0) throw std::logic_error("B statistic is undefined before the first batch");
  return sum_ / static_cast<double>(count_);
}

ConvergenceFlag BMonitor::flag() const {
  if (count_ < kMinBatches) return ConvergenceFlag::InsufficientData;
  return classify(statistic(), interval());
}

BMonitor b_update(BMonitor monitor, double smmd_value) {
  require_finite(smmd_value);
  monitor.count_ += 1;
  monitor.sum_ += smmd_value;
  return monitor;
}

EMonitor::EMonitor(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("momentum must lie in (0, 1)");
}

ConvergenceFlag EMonitor::flag() const {
  // 1 / (1 - alpha) rounded up, ignoring rounding noise in 1 - alpha
  const double window = std::ceil(1.0 / (1.0 - alpha_) - 1e-9);
  if (static_cast<double>(count_) < window) return ConvergenceFlag::InsufficientData;
  return classify(value_, interval());
}

EMonitor e_update(EMonitor monitor, double smmd_value) {
  require_finite(smmd_value);
  monitor.value_ = monitor.alpha_ * monitor.value_ + (1.0 - monitor.alpha_) * smmd_value;
  monitor.count_ += 1;
  return monitor;
}

}  // namespace smmd
