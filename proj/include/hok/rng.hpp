#pragma once

#include <cstdint>
#include <random>

namespace hok {

// SplitMix64 step; used to spread a master seed into stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic stream seed from a master seed and up to two indices.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix64(s);
  s += (a + 1) * 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(s);
  s += (b + 1) * 0xd1b54a32d192ed03ULL;
  h ^= splitmix64(s);
  return h;
}

// Seeded random stream. mt19937_64 is fully specified by the standard and all
// variate transforms in this project are hand-rolled, so streams reproduce
// bit-for-bit across platforms.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); safe to pass to log().
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace hok
