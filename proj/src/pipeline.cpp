#include "bsrnn/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "bsrnn/error.hpp"
#include "bsrnn/stft.hpp"

namespace bsrnn {
namespace {

std::vector<double> separate_samples(const SpectrogramSeparator& separator, std::span<const double> samples) {
  const ComplexSpectrogram mix = stft(samples, separator.stft_config(), separator.sample_rate());
  const ComplexSpectrogram est = separator.separate(mix);
  return istft(est, samples.size());
}

void check_rate(const SpectrogramSeparator& separator, const AudioTrack& track) {
  if (track.sample_rate != separator.sample_rate()) {
    throw Error(ErrorCode::kUnsupportedSampleRate,
                "sample rate " + std::to_string(track.sample_rate) + " Hz is not supported (model expects " +
                    std::to_string(separator.sample_rate()) + " Hz)");
  }
}

// Runs fn(i) for i in [0, count) on up to `threads` workers and rethrows the
// first failure.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  const unsigned n = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  for (unsigned w = 0; w < n; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

void InferenceConfig::validate() const {
  if (!(chunk_seconds > 0.0)) throw Error(ErrorCode::kInvalidArgument, "chunk length must be positive");
  if (!(hop_seconds > 0.0) || hop_seconds > chunk_seconds) {
    throw Error(ErrorCode::kInvalidArgument, "hop must satisfy 0 < hop <= chunk length");
  }
}

AudioTrack separate_waveform(const SpectrogramSeparator& separator, const AudioTrack& track) {
  track.validate();
  check_rate(separator, track);
  AudioTrack out = track;
  for (std::size_t c = 0; c < track.num_channels(); ++c) {
    const std::vector<double> in(track.channels[c].begin(), track.channels[c].end());
    const auto y = separate_samples(separator, in);
    for (std::size_t i = 0; i < y.size(); ++i) out.channels[c][i] = static_cast<float>(y[i]);
  }
  return out;
}

AudioTrack separate_track(const SpectrogramSeparator& separator, const InferenceConfig& config,
                          const AudioTrack& track) {
  config.validate();
  track.validate();
  check_rate(separator, track);

  const auto chunk = static_cast<std::size_t>(std::llround(config.chunk_seconds * track.sample_rate));
  const auto hop = static_cast<std::size_t>(std::llround(config.hop_seconds * track.sample_rate));
  if (hop == 0 || hop > chunk) throw Error(ErrorCode::kInvalidArgument, "hop rounds to an invalid sample count");
  const std::size_t pad = chunk - hop;
  const std::size_t length = track.length();
  const std::size_t padded = length + 2 * pad;
  const std::size_t num_chunks = padded <= chunk ? 1 : (padded - chunk + hop - 1) / hop + 1;
  const std::size_t buffer_len = (num_chunks - 1) * hop + chunk;

  AudioTrack out = AudioTrack::zeros(track.num_channels(), length, track.sample_rate);
  // Tasks are processed in waves; accumulation happens in task order so the
  // sum is identical for any number of workers.
  const std::size_t wave = std::max<std::size_t>(1, 2 * static_cast<std::size_t>(config.threads));
  for (std::size_t c = 0; c < track.num_channels(); ++c) {
    std::vector<double> signal(buffer_len, 0.0);
    std::copy(track.channels[c].begin(), track.channels[c].end(), signal.begin() + static_cast<std::ptrdiff_t>(pad));
    std::vector<double> acc(buffer_len, 0.0);
    std::vector<std::uint32_t> coverage(buffer_len, 0);

    for (std::size_t first = 0; first < num_chunks; first += wave) {
      const std::size_t count = std::min(wave, num_chunks - first);
      std::vector<std::vector<double>> results(count);
      parallel_for(count, config.threads, [&](std::size_t j) {
        const std::size_t start = (first + j) * hop;
        results[j] = separate_samples(separator, std::span<const double>(signal.data() + start, chunk));
      });
      for (std::size_t j = 0; j < count; ++j) {
        const std::size_t start = (first + j) * hop;
        for (std::size_t i = 0; i < chunk; ++i) {
          acc[start + i] += results[j][i];
          ++coverage[start + i];
        }
      }
    }
    for (std::size_t i = 0; i < length; ++i) {
      out.channels[c][i] = static_cast<float>(acc[pad + i] / coverage[pad + i]);
    }
  }
  return out;
}

}  // namespace bsrnn
