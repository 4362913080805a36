#include "envkit/rng.hpp"

namespace envkit {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

Philox4x32::Block Philox4x32::bijection(Block ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

void Philox4x32::refill() {
  const Block ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                  static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  buffer_ = bijection(ctr, key_);
  ++block_;
  used_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() {
  if (used_ == 2) refill();
  const std::uint64_t lo = buffer_[2 * used_];
  const std::uint64_t hi = buffer_[2 * used_ + 1];
  ++used_;
  return (hi << 32) | lo;
}

std::uint64_t replicate_stream(std::uint64_t replicate, std::uint32_t attempt) {
  return ((replicate & 0x7FFFFFFFFFFFFFull) << 8) | (attempt & 0xFFu);
}

std::uint64_t dataset_stream(std::uint64_t tag) {
  return (std::uint64_t{1} << 63) | (tag & 0x7FFFFFFFFFFFFFFFull);
}

}  // namespace envkit
