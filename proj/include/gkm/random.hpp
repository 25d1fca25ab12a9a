#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gkm {

/// Seedable generator whose output is fully specified, so runs are
/// replicable across standard libraries and across implementations.
///
/// Engine: std::mt19937_64 (output is fixed by the C++ standard).
/// Integers in [0, n): Lemire's multiply-shift with rejection.
/// Reals in [0, 1): top 53 bits of one engine draw times 2^-53.
/// Normals: Box-Muller, both variates used in order.
///
/// std::uniform_int_distribution and std::normal_distribution are avoided
/// because their algorithms are implementation-defined.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm =
      "mt19937_64+lemire-u64+u53+box-muller";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Uniform real in [0, 1).
  double uniform01();

  /// Uniform real in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gkm
