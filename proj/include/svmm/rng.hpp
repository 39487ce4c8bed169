#pragma once

#include <cstdint>
#include <random>

namespace svmm {

// SplitMix64 finalizer. Used to derive independent stream seeds from a
// master seed and a stream index, so each path's draws do not depend on how
// many other paths run or on which worker runs them.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

// Per-path random stream.
class PathRng {
public:
  explicit PathRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Fair +1 / -1.
  double sign() noexcept { return (engine_() >> 63) ? 1.0 : -1.0; }

  double normal() { return normal_(engine_); }

  std::mt19937_64& engine() noexcept { return engine_; }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace svmm
