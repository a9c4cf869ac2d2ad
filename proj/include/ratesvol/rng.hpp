#pragma once

#include <cstdint>
#include <limits>

namespace ratesvol {

/// SplitMix64 finaliser; used to expand seeds and derive independent streams.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of stream `index` under master `seed`. Distinct (seed, index) pairs give
/// unrelated xoshiro states; the mapping is fixed so runs are reproducible.
constexpr std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix64(s);
  std::uint64_t t = index ^ 0xD1B54A32D192ED03ULL;
  const std::uint64_t b = splitmix64(t);
  std::uint64_t mix = a ^ (b + 0x632BE59BD9B4E019ULL + (a << 6) + (a >> 2));
  return splitmix64(mix);
}

/// xoshiro256** 1.0. Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4]{};
};

/// Standard normal draws by the Marsaglia polar method.
class NormalSampler {
 public:
  double operator()(Xoshiro256& rng) noexcept;

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// IID innovation law, always scaled to zero mean and unit variance.
struct InnovationLaw {
  enum class Kind { Gaussian, Laplace, StudentT };
  Kind kind = Kind::Gaussian;
  double dof = 5.0;  // Student t only; must exceed 2

  static InnovationLaw gaussian() { return {}; }
  static InnovationLaw laplace() { return {Kind::Laplace, 0.0}; }
  static InnovationLaw student_t(double dof) { return {Kind::StudentT, dof}; }
};

class InnovationSampler {
 public:
  InnovationSampler(InnovationLaw law, std::uint64_t seed);
  double operator()() noexcept;

 private:
  double gamma(double shape) noexcept;

  InnovationLaw law_;
  Xoshiro256 rng_;
  NormalSampler normal_;
};

}  // namespace ratesvol
