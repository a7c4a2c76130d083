// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace forge {

// Error taxonomy maps onto the CLI exit-code contract:
// UsageError -> 1, DataError -> 2, TranslatorError -> 3.
class ForgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public ForgeError {
 public:
  using ForgeError::ForgeError;
};

class DataError : public ForgeError {
 public:
  using ForgeError::ForgeError;
};

class TranslatorError : public ForgeError {
 public:
  using ForgeError::ForgeError;
};

// splitmix64 finisher; used for seed derivation and stable tie-break keys.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// 128-bit content fingerprint; collision odds are negligible at corpus scale,
// which lets exact-dup tracking hold 16 bytes per line instead of the line itself.
struct Fingerprint128 {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  bool operator==(const Fingerprint128&) const = default;
};

inline Fingerprint128 fingerprint128(std::string_view s) {
  Fingerprint128 fp;
  fp.lo = fnv1a64(s);
  fp.hi = mix64(fnv1a64(s, 0x9ae16a3b2f90404full));
  return fp;
}

struct Fingerprint128Hash {
  std::size_t operator()(const Fingerprint128& fp) const noexcept {
    return static_cast<std::size_t>(fp.lo ^ mix64(fp.hi));
  }
};

// Deterministic RNG. mt19937_64 has a standard-specified sequence; the bounded
// draw and shuffle avoid uniform_int_distribution, whose mapping is
// implementation-defined, so outputs are byte-stable across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, n), n >= 1, via rejection sampling.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = gen_();
    } while (r >= limit);
    return r % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[bounded(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

// Runs fn over [0,n) split into contiguous chunks, one per worker.
// Caller guarantees the chunks touch disjoint state.
inline void parallel_for(std::size_t n, unsigned workers,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  if (workers <= 1 || n < 2 * workers) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = static_cast<std::size_t>(w) * chunk;
    if (begin >= n) break;
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace forge
