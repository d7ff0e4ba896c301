#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace adascope {

// Named stream splitting: child = mix(root, fnv1a64(label) [, index]).
// Consumers always derive their own stream from the run seed, so adding or
// reordering consumers never perturbs unrelated streams.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);
std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index);

// mt19937_64 engine with explicit Box-Muller normals. The engine sequence is
// fully specified by the standard and the transforms are local, so draws are
// reproducible across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01();                   // (0, 1]
  double normal();                      // N(0, 1)
  int uniform_int(int lo, int hi);      // inclusive bounds, unbiased

 private:
  std::mt19937_64 eng_;
};

}  // namespace adascope
