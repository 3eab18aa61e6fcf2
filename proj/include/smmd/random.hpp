#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "smmd/types.hpp"

namespace smmd {

using Rng = std::mt19937_64;

/// Deterministic generator for the stream identified by (root_seed, tags...).
/// Distinct tag tuples give independent-looking streams; the mapping does not
/// depend on how many other streams exist or in what order they are drawn.
Rng substream(std::uint64_t root_seed, std::initializer_list<std::uint64_t> tags);

/// n x d matrix of i.i.d. N(0, 1) entries, filled row by row.
Matrix standard_normal(std::size_t n, std::size_t d, Rng& rng);

/// n x d matrix of i.i.d. U[-sqrt(3), sqrt(3)] entries (zero mean, unit variance).
Matrix uniform_cube(std::size_t n, std::size_t d, Rng& rng);

}  // namespace smmd
