#pragma once

// Seed fan-out. Every random stream in an experiment is derived from the
// root seed plus a purpose tag and up to two indices (typically a client or
// group key and a round), so a stream never depends on scheduling order.

#include <cstdint>
#include <random>
#include <span>

namespace safari::rng {

using Engine = std::mt19937_64;

enum class Purpose : std::uint64_t {
  data = 1,
  holdout = 2,
  partition = 3,
  init = 4,
  mask = 5,
  uplink = 6,
  downlink = 7,
  batch = 8,
  analysis = 9,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive(std::uint64_t root, Purpose purpose, std::uint64_t a = 0,
                               std::uint64_t b = 0) noexcept {
  std::uint64_t h = splitmix64(root);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  h = splitmix64(h ^ a);
  return splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
}

inline Engine make(std::uint64_t root, Purpose purpose, std::uint64_t a = 0, std::uint64_t b = 0) {
  return Engine(derive(root, purpose, a, b));
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Engine& engine, double p) { return uniform01(engine) < p; }

// Unbiased integer in [0, n) by rejection.
inline std::uint64_t below(Engine& engine, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t draw;
  do {
    draw = engine();
  } while (draw >= limit);
  return draw % n;
}

template <typename T>
void shuffle(std::span<T> items, Engine& engine) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(below(engine, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace safari::rng
