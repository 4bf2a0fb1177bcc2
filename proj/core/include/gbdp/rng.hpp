#pragma once

#include <cstdint>

namespace gbdp {

// Counter-based generator in the Philox 2x64 style (10 rounds). A stream is
// fully determined by (seed, stream): block b of stream s is a keyed mixing of
// the counter b, so any replication of a Monte Carlo run can be regenerated in
// isolation and in any order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key0_(seed), key1_(stream) {}

  std::uint64_t next();

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01();

  // Exponential with the given rate (> 0).
  double exponential(double rate);

 private:
  void refill();

  std::uint64_t key0_;
  std::uint64_t key1_;
  std::uint64_t counter_ = 0;
  std::uint64_t buf_[2] = {0, 0};
  int have_ = 0;
};

// Seed for Monte Carlo replication r: splitmix64(base_seed + r * golden gamma).
// Injective in r, so derived seeds are pairwise distinct.
std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t replication);

}  // namespace gbdp
