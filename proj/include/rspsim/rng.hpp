#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>

namespace rsp {

// Finalizer from the splitmix64 generator; a good 64-bit mixer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Derives independent random substreams from a master seed by absorbing the
// values that identify a unit of work (grid point, outcome, basis, purpose
// tag). Keys depend on content rather than loop position, so per-cell
// statistics do not change when points or outcomes are reordered and serial
// and parallel runs draw identical streams.
class StreamKey {
 public:
  explicit StreamKey(std::uint64_t master_seed)
      : h_(splitmix64(master_seed ^ 0x5a17c3a5u)) {}

  StreamKey& absorb(std::uint64_t v) {
    h_ = splitmix64(h_ ^ splitmix64(v));
    return *this;
  }

  StreamKey& absorb(std::int64_t v) { return absorb(static_cast<std::uint64_t>(v)); }
  StreamKey& absorb(int v) { return absorb(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }

  StreamKey& absorb(double v) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("StreamKey: non-finite value");
    }
    if (v == 0.0) v = 0.0;  // collapse -0.0 and +0.0
    return absorb(std::bit_cast<std::uint64_t>(v));
  }

  StreamKey& absorb(std::string_view tag) {
    // FNV-1a, then mix through the sponge.
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char ch : tag) {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ull;
    }
    return absorb(h);
  }

  std::uint64_t value() const { return h_; }

  std::mt19937_64 stream() const { return std::mt19937_64(h_); }

 private:
  std::uint64_t h_;
};

inline std::int64_t binomial_draw(std::mt19937_64& rng, std::int64_t n, double p) {
  if (n < 0 || p < 0.0 || p > 1.0) {
    throw std::invalid_argument("binomial_draw: invalid parameters");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  std::binomial_distribution<std::int64_t> dist(n, p);
  return dist(rng);
}

}  // namespace rsp
