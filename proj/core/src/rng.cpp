#include "v2m/rng.hpp"

#include <cmath>
#include <numbers>

namespace v2m {

double Rng::normal() {
  // u1 in (0, 1] so the log is finite
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stage) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((master >> (8 * i)) & 0xff);
  std::uint64_t h = fnv1a64(std::string_view(buf, 8));
  for (unsigned char c : stage) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace v2m
