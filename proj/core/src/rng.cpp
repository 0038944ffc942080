#include "urllc/rng.hpp"

#include <cmath>
#include <numbers>

namespace urllc {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + kGolden + (h << 6) + (h >> 2)));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, StreamId id) {
  std::uint64_t h = mix64(seed + kGolden);
  h = combine(h, id.phase);
  h = combine(h, static_cast<std::uint64_t>(id.purpose));
  h = combine(h, id.index);
  key_ = h;
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::exponential() { return -std::log1p(-uniform()); }

double RngStream::normal() {
  // 1 - u lies in (0, 1], so the logarithm is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t trial) {
  return combine(combine(mix64(seed), point), trial);
}

}  // namespace urllc
