#include "adascope/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace adascope {

namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
  return splitmix64(root ^ fnv1a64(label));
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index) {
  return splitmix64(derive_seed(root, label) ^ splitmix64(index));
}

double Rng::uniform01() {
  // 53 random bits; +1 shifts the support to (0, 1] so log() below is safe.
  return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int Rng::uniform_int(int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = eng_();
  } while (x >= limit);
  return lo + static_cast<int>(x % span);
}

}  // namespace adascope
