#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bsrnn/audio.hpp"

namespace bsrnn {

// Energy-based source-activity detection. A track is cut into segments on a
// 50%-overlap grid; each segment is cut into chunks whose mean-square energy
// is compared against a track-level threshold.
struct SadConfig {
  double segment_seconds = 6.0;
  std::size_t chunks_per_segment = 10;
  double overlap = 0.5;
  double silent_energy = 1e-5;  // energy assigned to all-zero chunks
  double quantile = 0.15;
  double energy_floor = 1e-3;   // lower bound on the threshold
};

struct SalientSegment {
  std::size_t start = 0;
  std::size_t length = 0;

  bool operator==(const SalientSegment&) const = default;
};

struct SadResult {
  std::vector<SalientSegment> segments;
  double threshold = 0.0;
  std::size_t grid_segments = 0;
  bool too_short = false;  // track shorter than one segment; segments is empty
};

double chunk_energy(std::span<const float> chunk, double silent_energy = 1e-5);
// Mean over channels of the per-channel mean square of [begin, begin + length).
double chunk_energy(const AudioTrack& track, std::size_t begin, std::size_t length,
                    double silent_energy = 1e-5);

// Linear interpolation between order statistics at position q * (n - 1).
double quantile_linear(std::vector<double> values, double q);

double saliency_threshold(std::span<const double> energies, const SadConfig& cfg = {});

SadResult detect_salient_segments(const AudioTrack& track, const SadConfig& cfg = {});

}  // namespace bsrnn
