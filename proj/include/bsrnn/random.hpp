#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace bsrnn {

// Source of every random decision made by the data pipelines. Derived
// classes may script individual decisions; the defaults derive everything
// from next_u64().
class RandomSource {
 public:
  virtual ~RandomSource() = default;

  virtual std::uint64_t next_u64() = 0;

  // Uniform in [0, 1) with 53 random bits.
  virtual double uniform01();
  virtual double uniform(double lo, double hi);
  // Uniform integer in [0, n); n must be positive.
  virtual std::size_t index(std::size_t n);
  virtual bool bernoulli(double p);
};

class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next_u64() override { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finaliser; derives independent seeds from (seed, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace bsrnn
