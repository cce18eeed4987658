#pragma once

#include <cstdint>
#include <span>

namespace graphdiff {

/// Deterministic random stream. Streams derived from the same seed but
/// different stream indices are independent, which is how parallel sampling
/// stays reproducible regardless of thread scheduling.
///
/// All distributions are implemented by hand on top of the raw generator so
/// that results do not depend on the standard library's unspecified
/// distribution algorithms.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform();

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi);

  /// Standard normal via Box-Muller (second value cached).
  double normal();

  /// Index sampled from an unnormalized nonnegative weight vector.
  /// Throws if the total mass is not positive or a weight is negative.
  int categorical(std::span<const double> weights);

  /// Child stream with an independent state, for per-item parallel work.
  RngStream spawn(std::uint64_t stream_index) const;

 private:
  std::uint64_t state_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace graphdiff
