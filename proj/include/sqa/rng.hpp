#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <random>

namespace sqa {

// Source of the discrete decisions made by the Monte Carlo moves. Every
// random choice in a move goes through one of these three calls, which lets
// tests replace the generator by an exhaustive enumerator.
template <class R>
concept DecisionSource = requires(R& r, double p, std::size_t n) {
  { r.bernoulli(p) } -> std::same_as<bool>;
  { r.first_success(p, n) } -> std::same_as<std::size_t>;
  { r.index(n) } -> std::same_as<std::size_t>;
};

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// MT19937-64 with hand-written mappings to [0,1) and to integers, so that
// streams are bit-identical across standard libraries (std distributions are
// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // 53-bit uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return uniform() < p;
  }

  // Index of the first success among n independent Bernoulli(q) trials, or n
  // if all fail. Direct trials for large q, inversion of the geometric law
  // otherwise.
  std::size_t first_success(double q, std::size_t n) {
    if (n == 0) return 0;
    if (q >= 1.0) return 0;
    if (q <= 0.0) return n;
    if (q >= 0.25) {
      for (std::size_t k = 0; k < n; ++k)
        if (uniform() < q) return k;
      return n;
    }
    if (q != cached_q_) {
      cached_q_ = q;
      cached_log_ = std::log1p(-q);
    }
    const double k = std::floor(std::log1p(-uniform()) / cached_log_);
    return k >= static_cast<double>(n) ? n : static_cast<std::size_t>(k);
  }

  // Uniform integer in [0, n), rejection sampling on the top bits.
  std::size_t index(std::size_t n) {
    const std::uint64_t range = n;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % range);
  }

 private:
  std::mt19937_64 engine_;
  double cached_q_ = -1.0;
  double cached_log_ = 0.0;
};

static_assert(DecisionSource<Rng>);

}  // namespace sqa
