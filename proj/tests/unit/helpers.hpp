#pragma once

#include <cmath>
#include <optional>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "bsrnn/audio.hpp"

namespace testing {

inline std::vector<double> noise(std::size_t n, std::uint64_t seed, double amp = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amp, amp);
  std::vector<double> x(n);
  for (auto& v : x) v = dist(rng);
  return x;
}

inline bsrnn::AudioTrack noise_track(std::size_t channels, std::size_t n, std::uint64_t seed, float amp = 0.5f,
                                     int rate = 44100) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-amp, amp);
  auto t = bsrnn::AudioTrack::zeros(channels, n, rate);
  for (auto& ch : t.channels) {
    for (auto& v : ch) v = dist(rng);
  }
  return t;
}

inline bsrnn::AudioTrack sine_track(std::size_t n, double freq, double amp = 1.0, int rate = 44100) {
  auto t = bsrnn::AudioTrack::zeros(1, n, rate);
  for (std::size_t i = 0; i < n; ++i) {
    t.channels[0][i] = static_cast<float>(amp * std::sin(2.0 * M_PI * freq * static_cast<double>(i) / rate));
  }
  return t;
}

inline double max_abs_diff(const bsrnn::AudioTrack& a, const bsrnn::AudioTrack& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < a.num_channels(); ++c) {
    for (std::size_t i = 0; i < a.length(); ++i) {
      m = std::max(m, std::abs(static_cast<double>(a.channels[c][i]) - b.channels[c][i]));
    }
  }
  return m;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("bsrnn_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing

#include <deque>

#include "bsrnn/random.hpp"

namespace testing {

// Random source with scripted answers; unscripted calls fall back to a
// seeded generator.
class ScriptedRandom : public bsrnn::RandomSource {
 public:
  explicit ScriptedRandom(std::uint64_t seed = 0) : fallback_(seed) {}
  std::uint64_t next_u64() override { return fallback_.next_u64(); }
  double uniform(double lo, double hi) override {
    if (fixed_uniform_) return *fixed_uniform_;
    return bsrnn::RandomSource::uniform(lo, hi);
  }
  bool bernoulli(double p) override {
    if (bernoulli_.empty()) return fixed_bernoulli_ ? *fixed_bernoulli_ : bsrnn::RandomSource::bernoulli(p);
    const bool v = bernoulli_.front();
    bernoulli_.pop_front();
    return v;
  }
  std::size_t index(std::size_t n) override {
    if (index_.empty()) return bsrnn::RandomSource::index(n);
    const std::size_t v = index_.front();
    index_.pop_front();
    return v < n ? v : n - 1;
  }

  std::optional<double> fixed_uniform_;
  std::optional<bool> fixed_bernoulli_;
  std::deque<bool> bernoulli_;
  std::deque<std::size_t> index_;

 private:
  bsrnn::SeededRandom fallback_;
};

}  // namespace testing
