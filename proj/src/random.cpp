#include "cfkit/random.hpp"

#include <limits>
#include <numeric>

namespace cfkit {

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection sampling over the largest multiple of bound.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % bound;
}

double Rng::unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> Rng::sample(std::size_t population,
                                     std::size_t count) {
  std::vector<std::size_t> pool(population);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `count` slots end up uniformly drawn.
  for (std::size_t i = 0; i < count && i < population; ++i) {
    const std::size_t j = i + below(population - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(std::min(count, population));
  return pool;
}

}  // namespace cfkit
