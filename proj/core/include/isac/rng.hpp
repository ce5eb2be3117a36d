#pragma once

#include <cstdint>
#include <random>

#include "isac/types.hpp"

namespace isac {

/// Deterministic random stream. The same seed yields the same sample
/// sequence on every run of the same build; sampling is implemented on top
/// of the (fully specified) mt19937_64 engine so the sequence does not
/// depend on the standard library's distribution internals.
///
/// One instance must be consumed by a single owner. Parallel work derives
/// independent streams with child().
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  /// Uniform double in the open interval (0, 1).
  double uniform();

  /// Standard real Gaussian N(0, 1).
  double normal();

  /// Circularly symmetric complex Gaussian CN(0, 1).
  Complex cnormal();

  /// Independent child stream for worker `stream`. Children of the same
  /// parent with distinct indices are decorrelated; the construction is a
  /// pure function of (seed, stream).
  SeededRng child(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace isac
