#pragma once

#include <map>
#include <string>
#include <vector>

#include "bsrnn/audio.hpp"
#include "bsrnn/random.hpp"

namespace bsrnn {

// Salient segments grouped by stem type. Stem order is insertion order.
class StemPool {
 public:
  void add(const std::string& stem, AudioTrack segment);
  const std::vector<std::string>& stems() const { return order_; }
  const std::vector<AudioTrack>& segments(const std::string& stem) const;
  bool has(const std::string& stem) const { return segments_.count(stem) != 0; }
  void validate() const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::vector<AudioTrack>> segments_;
};

struct MixSimConfig {
  double chunk_seconds = 3.0;
  double gain_db_range = 10.0;  // gains drawn from U[-range, +range] dB
  double drop_prob = 0.1;
};

// One source signal entering a simulated mixture.
struct SourceChunk {
  std::string label;
  AudioTrack audio;
  bool is_target = false;
};

struct TrainingExample {
  AudioTrack mixture;
  AudioTrack target;
  std::vector<std::string> labels;  // one per source, target first
  std::vector<double> gain_db;
  std::vector<bool> dropped;
  float scale = 1.0f;  // divisor applied for peak normalisation
  bool silent = false; // every surviving source was zero; no normalisation
};

double gain_from_db(double db);

// Draws one chunk per stem: the target stem first, then the others in pool
// order. Each stem uses a random segment and a uniform chunk offset.
std::vector<SourceChunk> draw_stem_chunks(const StemPool& pool, const std::string& target_stem,
                                          std::size_t chunk_length, RandomSource& rng);

// Per source: scale by a random gain, drop with drop_prob, then sum and
// normalise mixture and target by the larger of their peaks.
TrainingExample augment_and_mix(const std::vector<SourceChunk>& sources, const MixSimConfig& cfg,
                                RandomSource& rng);

TrainingExample sample_training_example(const StemPool& pool, const std::string& target_stem,
                                        const MixSimConfig& cfg, RandomSource& rng);

std::size_t chunk_samples(double seconds, int sample_rate);

}  // namespace bsrnn
