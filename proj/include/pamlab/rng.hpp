#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace pamlab {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based stream keyed by (seed, stream). Draw k of a stream depends
/// only on (seed, stream, k), so replicas are reproducible and independent of
/// the order in which they are generated.
class CounterRng {
public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal (Box-Muller; deterministic across platforms).
  double normal();

private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

} // namespace pamlab
