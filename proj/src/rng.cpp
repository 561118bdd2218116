#include "exitlab/rng.hpp"

#include <boost/random/normal_distribution.hpp>

namespace exitlab {

Stream::Stream(std::uint64_t seed, std::uint64_t index) : seed_(seed), index_(index) {
  const std::uint64_t k = mix64(seed);
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

Stream Stream::derive(std::uint64_t tag) const {
  return Stream(mix64(seed_ ^ mix64(tag + 0x632be59bd9b4e019ULL)), index_);
}

double Stream::normal() {
  boost::random::normal_distribution<double> dist;
  return dist(*this);
}

std::uint64_t Stream::uniform_index(std::uint64_t n) {
  if (n <= 1) return 0;
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace exitlab
