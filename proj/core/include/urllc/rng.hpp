#pragma once

#include <cstdint>

namespace urllc {

/// What a random stream is used for. Distinct purposes never share draws.
enum class StreamPurpose : std::uint32_t {
  distance = 1,
  arrival = 2,
  channel = 3,
  mutual_information = 4,
  oracle = 100,
};

/// Identifies one substream: (phase, purpose, index) under a master seed.
struct StreamId {
  std::uint64_t phase = 0;
  StreamPurpose purpose = StreamPurpose::oracle;
  std::uint64_t index = 0;
};

/// Counter-based random stream. The k-th draw is a pure function of
/// (seed, stream id, k), so streams can be created in any order, on any thread,
/// and reproduce the same sequence.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, StreamId id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return next_u64(); }
  result_type next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Unit-mean exponential.
  double exponential();
  /// Standard normal (Box-Muller, one draw per pair of uniforms consumed).
  double normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Derives an independent master seed for trial `trial` of sweep point `point`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t trial);

}  // namespace urllc
