#pragma once

#include <cstdint>
#include <vector>

namespace ssg {

// Deterministic seedable generator for the finite-population dynamics.
// splitmix64 (Steele, Lea, Flood 2014): state advances by the golden-gamma
// constant and the output is a bijective mix of the state.  Uniform doubles
// take the top 53 bits; categorical draws invert the CDF on that uniform.
// Traces are replayable bit-exactly from (seed, config) on any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double next_double() {  // uniform on [0,1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Index sampled from an (unnormalized is fine) probability vector.
  int sample(const std::vector<double>& probs) {
    double total = 0.0;
    for (double p : probs) total += p;
    double u = next_double() * total;
    for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
      u -= probs[k];
      if (u < 0.0) return static_cast<int>(k);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::uint64_t state_;
};

}  // namespace ssg
