#include "adsparse/rng.hpp"

#include <cmath>
#include <numbers>

namespace adsparse {

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

uint64_t finalize(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

uint64_t mix_at(uint64_t seed, uint64_t index) {
  return finalize(seed + (index + 1) * kGolden);
}

double uniform_at(uint64_t seed, uint64_t index) {
  return static_cast<double>(mix_at(seed, index) >> 11) * 0x1.0p-53;
}

double normal_at(uint64_t seed, uint64_t index) {
  // u1 in (0, 1] so the log is finite.
  const double u1 = static_cast<double>((mix_at(seed, 2 * index) >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform_at(seed, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_normal() {
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

uint64_t Rng::next_below(uint64_t bound) {
  return static_cast<uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
}

uint64_t derive_seed(uint64_t master, std::string_view tag, int s, int trial) {
  uint64_t h = finalize(master ^ fnv1a(tag));
  h = finalize(h + kGolden * static_cast<uint64_t>(s));
  h = finalize(h + kGolden * static_cast<uint64_t>(trial));
  return h;
}

}  // namespace adsparse
