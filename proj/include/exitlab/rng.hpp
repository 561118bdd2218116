#pragma once

// Counter-based random streams.
//
// Every stream is a Philox4x32-10 keystream: the key is derived from a master
// seed, the upper half of the 128-bit counter holds the stream index and the
// lower half counts blocks. Two streams with different (seed, index) pairs are
// therefore independent, and the values drawn by sample i never depend on
// which worker thread ran it.

#include <array>
#include <cstdint>

namespace exitlab {

/// One Philox4x32-10 block.
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{0xD2511F53} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{0xCD9E8D57} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += 0x9E3779B9;
    key[1] += 0xBB67AE85;
  }
  return ctr;
}

/// SplitMix64 finalizer, used to turn seeds and tags into keys.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index);

  /// stream_i = split(master_seed, i)
  static Stream split(std::uint64_t master_seed, std::uint64_t index) {
    return Stream(master_seed, index);
  }

  /// A stream keyed by (seed, tag) that shares this stream's index.
  /// Used for decorrelated substreams (branching, kMC draws).
  Stream derive(std::uint64_t tag) const;

  std::uint64_t next_u64() {
    if (used_ > 2) refill();  // a 64-bit draw never straddles two blocks
    const std::uint64_t v =
        static_cast<std::uint64_t>(buffer_[used_]) | (static_cast<std::uint64_t>(buffer_[used_ + 1]) << 32);
    used_ += 2;
    return v;
  }

  std::uint32_t next_u32() {
    if (used_ > 3) refill();
    return buffer_[used_++];
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard Gaussian, ziggurat method (Boost.Random's normal_distribution
  /// driven by next_u64).
  double normal();

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

  /// Uniform integer in [0, n), unbiased (Lemire's rejection method).
  std::uint64_t uniform_index(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

 private:
  void refill() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32)};
    buffer_ = philox4x32_10(ctr, key_);
    ++block_;
    used_ = 0;
  }

  std::uint64_t seed_;
  std::uint64_t index_;
  std::array<std::uint32_t, 2> key_{};
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

}  // namespace exitlab
