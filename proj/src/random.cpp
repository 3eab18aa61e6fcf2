#include "smmd/random.hpp"

#include <cmath>
#include <vector>

namespace smmd {

Rng substream(std::uint64_t root_seed, std::initializer_list<std::uint64_t> tags) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (tags.size() + 1));
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(root_seed);
  for (std::uint64_t t : tags) push(t);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

Matrix standard_normal(std::size_t n, std::size_t d, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix out(n, d);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index k = 0; k < out.cols(); ++k) out(i, k) = dist(rng);
  }
  return out;
}

Matrix uniform_cube(std::size_t n, std::size_t d, Rng& rng) {
  const double half_width = std::sqrt(3.0);
  std::uniform_real_distribution<double> dist(-half_width, half_width);
  Matrix out(n, d);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index k = 0; k < out.cols(); ++k) out(i, k) = dist(rng);
  }
  return out;
}

}  // namespace smmd
