#pragma once

// Philox4x32-10 counter-based generator. A (seed, stream) pair names an
// independent substream; draws within a stream walk a 64-bit block counter.
// Satisfies UniformRandomBitGenerator, so the <random> distributions apply.

#include <array>
#include <cstdint>

namespace envkit {

class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  /// The raw 10-round bijection, exposed for known-answer tests.
  static Block bijection(Block counter, Key key);

 private:
  void refill();

  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int used_ = 2;  // number of 64-bit halves consumed from buffer_
};

/// Stream identifiers. Replicate substreams and dataset streams live in
/// disjoint halves of the 64-bit stream space.
std::uint64_t replicate_stream(std::uint64_t replicate, std::uint32_t attempt);
std::uint64_t dataset_stream(std::uint64_t tag);

}  // namespace envkit
