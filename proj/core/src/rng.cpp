#include "isac/rng.hpp"

#include <cmath>

namespace isac {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// splitmix64 finalizer, used to decorrelate child-stream seeds.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

double SeededRng::uniform() {
  // 53-bit mantissa, shifted into (0,1) so log() is always finite.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double phi = kTwoPi * uniform();
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

Complex SeededRng::cnormal() {
  // Modulus-phase form: |z|^2 ~ Exp(1), arg(z) ~ U(0, 2pi).
  const double r = std::sqrt(-std::log(uniform()));
  const double phi = kTwoPi * uniform();
  return {r * std::cos(phi), r * std::sin(phi)};
}

SeededRng SeededRng::child(std::uint64_t stream) const {
  return SeededRng(mix64(seed_ ^ mix64(stream + 1)));
}

}  // namespace isac
