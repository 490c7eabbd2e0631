#include "bsrnn/sad.hpp"

#include <algorithm>
#include <cmath>

#include "bsrnn/error.hpp"

namespace bsrnn {

double chunk_energy(std::span<const float> chunk, double silent_energy) {
  if (chunk.empty()) throw Error(ErrorCode::kInvalidArgument, "chunk is empty");
  double sum = 0.0;
  for (float v : chunk) sum += static_cast<double>(v) * v;
  if (sum == 0.0) return silent_energy;
  return sum / static_cast<double>(chunk.size());
}

double chunk_energy(const AudioTrack& track, std::size_t begin, std::size_t length, double silent_energy) {
  if (length == 0) throw Error(ErrorCode::kInvalidArgument, "chunk is empty");
  if (begin + length > track.length()) throw Error(ErrorCode::kInvalidArgument, "chunk exceeds track");
  double sum = 0.0;
  for (const auto& ch : track.channels) {
    for (std::size_t i = begin; i < begin + length; ++i) sum += static_cast<double>(ch[i]) * ch[i];
  }
  if (sum == 0.0) return silent_energy;
  return sum / static_cast<double>(length * track.num_channels());
}

double quantile_linear(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "quantile of an empty list");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

double saliency_threshold(std::span<const double> energies, const SadConfig& cfg) {
  return std::max(quantile_linear({energies.begin(), energies.end()}, cfg.quantile), cfg.energy_floor);
}

SadResult detect_salient_segments(const AudioTrack& track, const SadConfig& cfg) {
  track.validate();
  if (cfg.chunks_per_segment == 0 || cfg.overlap < 0.0 || cfg.overlap >= 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid SAD configuration");
  }
  const auto seg_len = static_cast<std::size_t>(std::llround(cfg.segment_seconds * track.sample_rate));
  const auto hop = static_cast<std::size_t>(std::llround(static_cast<double>(seg_len) * (1.0 - cfg.overlap)));
  if (seg_len < cfg.chunks_per_segment || hop == 0) {
    throw Error(ErrorCode::kInvalidArgument, "segment too short for the chunk count");
  }

  SadResult result;
  if (track.length() < seg_len) {
    result.too_short = true;
    return result;
  }

  const std::size_t chunks = cfg.chunks_per_segment;
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + seg_len <= track.length(); s += hop) starts.push_back(s);
  result.grid_segments = starts.size();

  // Chunk energies of every grid segment; overlapped chunks appear twice.
  std::vector<double> energies;
  energies.reserve(starts.size() * chunks);
  for (std::size_t s : starts) {
    for (std::size_t j = 0; j < chunks; ++j) {
      const std::size_t b = s + j * seg_len / chunks;
      const std::size_t e = s + (j + 1) * seg_len / chunks;
      energies.push_back(chunk_energy(track, b, e - b, cfg.silent_energy));
    }
  }
  result.threshold = saliency_threshold(energies, cfg);

  for (std::size_t i = 0; i < starts.size(); ++i) {
    std::size_t active = 0;
    for (std::size_t j = 0; j < chunks; ++j) {
      if (energies[i * chunks + j] > result.threshold) ++active;
    }
    if (2 * active > chunks) result.segments.push_back({starts[i], seg_len});
  }
  return result;
}

}  // namespace bsrnn
