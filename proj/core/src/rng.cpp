#include "gbdp/rng.hpp"

#include <cmath>

#include "gbdp/errors.hpp"

namespace gbdp {

namespace {

constexpr std::uint64_t kPhiloxM = 0xD2B74407B1CE6E93ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;  // golden gamma
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) {
  const unsigned __int128 p =
      static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += kWeyl0;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

void CounterRng::refill() {
  std::uint64_t x0 = counter_;
  std::uint64_t x1 = key1_ ^ 0x5851F42D4C957F2DULL;  // stream mixed in
  std::uint64_t k0 = key0_;
  std::uint64_t k1 = key1_;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi, lo;
    mulhilo(kPhiloxM, x0, hi, lo);
    x0 = hi ^ k0 ^ x1;
    x1 = lo ^ k1;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  buf_[0] = x0;
  buf_[1] = x1;
  have_ = 2;
  ++counter_;
}

std::uint64_t CounterRng::next() {
  if (have_ == 0) refill();
  return buf_[--have_];
}

double CounterRng::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double CounterRng::exponential(double rate) {
  if (!(rate > 0.0)) throw domain_error("exponential rate must be positive");
  // 1 - u is in (0, 1], so the log is finite.
  return -std::log(1.0 - uniform01()) / rate;
}

std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t replication) {
  return splitmix64(base_seed + replication * kWeyl0);
}

}  // namespace gbdp
