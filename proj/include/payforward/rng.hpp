#pragma once

#include <cstdint>

namespace payforward {

// Counter-based generator over the splitmix64 finalizer: draw i of stream s
// is a pure function of (seed, s, i), so replicates are reproducible and
// independent regardless of scheduling.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed, uint64_t stream = 0)
      : base_(finalize(seed ^ finalize(stream + 0x5851f42d4c957f2dULL))) {}

  uint64_t next_u64() { return finalize(base_ + kGolden * ++counter_); }

  // uniform in [0, 1)
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_unit() < p; }

  CounterRng split(uint64_t stream) const { return CounterRng(base_, stream); }

 private:
  static constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static uint64_t finalize(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t base_ = 0;
  uint64_t counter_ = 0;
};

}  // namespace payforward
