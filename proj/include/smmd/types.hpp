#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace smmd {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Raised when numerical preconditions fail on otherwise well-formed input
/// (e.g. a covariance matrix too close to singular to whiten).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class KernelFamily { RBF, IMQ };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Kernel family plus width gamma. The scale parameterization s = gamma^2 / d
/// is available once a dimension is known.
class KernelSpec {
 public:
  KernelSpec(KernelFamily family, double gamma);

  static KernelSpec from_scale(KernelFamily family, double scale, std::size_t d);

  KernelFamily family() const { return family_; }
  double gamma() const { return gamma_; }
  double scale(std::size_t d) const;

  bool operator==(const KernelSpec&) const = default;

 private:
  KernelFamily family_;
  double gamma_;
};

double scale_to_gamma(double scale, std::size_t d);
double gamma_to_scale(double gamma, std::size_t d);

/// An n x d batch of points, one point per row. Always non-empty and finite.
class Sample {
 public:
  explicit Sample(Matrix data);

  std::size_t size() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(data_.cols()); }
  const Matrix& data() const { return data_; }
  auto row(std::size_t i) const { return data_.row(static_cast<Eigen::Index>(i)); }

 private:
  Matrix data_;
};

/// Gaussian random-encoder output: per-point means and diagonal standard
/// deviations, both n x d.
class RandomCodes {
 public:
  RandomCodes(Matrix means, Matrix sds);

  std::size_t size() const { return static_cast<std::size_t>(means_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(means_.cols()); }
  const Matrix& means() const { return means_; }
  const Matrix& sds() const { return sds_; }

  /// True when every row has a single shared standard deviation.
  bool isotropic() const;

 private:
  Matrix means_;
  Matrix sds_;
};

}  // namespace smmd
