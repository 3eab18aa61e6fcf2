#include "smmd/types.hpp"

#include <cmath>

namespace smmd {

std::string to_string(KernelFamily family) {
  return family == KernelFamily::RBF ? "rbf" : "imq";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "rbf" || name == "RBF") return KernelFamily::RBF;
  if (name == "imq" || name == "IMQ") return KernelFamily::IMQ;
  throw std::invalid_argument("unknown kernel family '" + name + "'");
}

KernelSpec::KernelSpec(KernelFamily family, double gamma) : family_(family), gamma_(gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("kernel width gamma must be positive and finite");
  }
}

KernelSpec KernelSpec::from_scale(KernelFamily family, double scale, std::size_t d) {
  return KernelSpec(family, scale_to_gamma(scale, d));
}

double KernelSpec::scale(std::size_t d) const { return gamma_to_scale(gamma_, d); }

double scale_to_gamma(double scale, std::size_t d) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("kernel scale must be positive and finite");
  }
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  return std::sqrt(scale * static_cast<double>(d));
}

double gamma_to_scale(double gamma, std::size_t d) {
  if (!(gamma > 0.0)) throw std::invalid_argument("kernel width gamma must be positive");
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  return gamma * gamma / static_cast<double>(d);
}

Sample::Sample(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw std::invalid_argument("sample must have at least one point and one dimension");
  }
  if (!data_.allFinite()) throw std::invalid_argument("sample contains non-finite entries");
}

RandomCodes::RandomCodes(Matrix means, Matrix sds) : means_(std::move(means)), sds_(std::move(sds)) {
  if (means_.rows() < 1 || means_.cols() < 1) {
    throw std::invalid_argument("random codes must have at least one point and one dimension");
  }
  if (means_.rows() != sds_.rows() || means_.cols() != sds_.cols()) {
    throw std::invalid_argument("means and standard deviations must have the same shape");
  }
  if (!means_.allFinite() || !sds_.allFinite()) {
    throw std::invalid_argument("random codes contain non-finite entries");
  }
  if ((sds_.array() < 0.0).any()) {
    throw std::invalid_argument("standard deviations must be nonnegative");
  }
}

bool RandomCodes::isotropic() const {
  for (Eigen::Index i = 0; i < sds_.rows(); ++i) {
    if ((sds_.row(i).array() != sds_(i, 0)).any()) return false;
  }
  return true;
}

}  // namespace smmd
