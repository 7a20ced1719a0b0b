#include "driftbandit/rng.hpp"

#include <algorithm>

#include <boost/random/beta_distribution.hpp>

namespace driftbandit {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t rep) noexcept {
  return splitmix64(base_seed ^ splitmix64(rep + 0x9E3779B97F4A7C15ULL));
}

std::size_t Rng::index(std::size_t n) noexcept {
  const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return std::min(i, n - 1);
}

double Rng::beta(double a, double b) {
  boost::random::beta_distribution<double> dist(a, b);
  return dist(engine_);
}

}  // namespace driftbandit
