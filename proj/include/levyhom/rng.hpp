#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace levyhom {

/// Philox4x32-10 block function (Salmon et al., SC'11).
///
/// Stateless: a (counter, key) pair maps to 128 random bits. All streams in
/// the project are built on top of it so that the numbers a path consumes
/// depend only on (seed, index, purpose) and never on thread scheduling.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key) noexcept;
};

/// Tags separating the independent streams derived from one master seed.
enum class StreamPurpose : std::uint32_t {
  medium = 1,
  noise = 2,
  bootstrap = 3,
  sampler = 4,
  pushforward = 5,
  test = 6,
};

/// Sequential view of the Philox stream keyed by (seed, purpose) and
/// positioned on sub-stream `index`.
///
/// Satisfies UniformRandomBitGenerator with 32-bit output.
class RandomStream {
 public:
  using result_type = std::uint32_t;

  RandomStream(std::uint64_t seed, std::uint64_t index, StreamPurpose purpose) noexcept;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next_u32(); }

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;
  /// Standard normal via Box-Muller (pairs are cached).
  double normal() noexcept;
  /// Exponential with unit rate.
  double exponential() noexcept;
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  void refill() noexcept;

  Philox4x32::Key key_{};
  Philox4x32::Counter counter_{};
  Philox4x32::Counter block_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// SplitMix64 finalizer, used to spread seeds into keys.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace levyhom
