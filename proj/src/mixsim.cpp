#include "bsrnn/mixsim.hpp"

#include <cmath>

#include "bsrnn/error.hpp"

namespace bsrnn {

void StemPool::add(const std::string& stem, AudioTrack segment) {
  segment.validate();
  auto [it, inserted] = segments_.try_emplace(stem);
  if (inserted) order_.push_back(stem);
  it->second.push_back(std::move(segment));
}

const std::vector<AudioTrack>& StemPool::segments(const std::string& stem) const {
  auto it = segments_.find(stem);
  if (it == segments_.end()) throw Error(ErrorCode::kConfig, "stem pool has no entry for '" + stem + "'");
  return it->second;
}

void StemPool::validate() const {
  if (order_.empty()) throw Error(ErrorCode::kConfig, "stem pool is empty");
  const AudioTrack* first = nullptr;
  for (const auto& stem : order_) {
    const auto& segs = segments_.at(stem);
    if (segs.empty()) throw Error(ErrorCode::kConfig, "stem '" + stem + "' has no segments");
    for (const auto& s : segs) {
      if (!first) first = &s;
      if (s.sample_rate != first->sample_rate || s.num_channels() != first->num_channels()) {
        throw Error(ErrorCode::kConfig, "stem pool mixes sample rates or channel counts");
      }
    }
  }
}

double gain_from_db(double db) { return std::pow(10.0, db / 20.0); }

std::size_t chunk_samples(double seconds, int sample_rate) {
  return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

std::vector<SourceChunk> draw_stem_chunks(const StemPool& pool, const std::string& target_stem,
                                          std::size_t chunk_length, RandomSource& rng) {
  pool.validate();
  if (!pool.has(target_stem)) {
    throw Error(ErrorCode::kConfig, "target stem '" + target_stem + "' missing from pool");
  }
  std::vector<std::string> order{target_stem};
  for (const auto& s : pool.stems()) {
    if (s != target_stem) order.push_back(s);
  }

  std::vector<SourceChunk> out;
  for (const auto& stem : order) {
    const auto& segs = pool.segments(stem);
    const AudioTrack& seg = segs[rng.index(segs.size())];
    if (seg.length() < chunk_length) {
      throw Error(ErrorCode::kConfig, "segment of stem '" + stem + "' is shorter than the chunk length");
    }
    const std::size_t offset = rng.index(seg.length() - chunk_length + 1);
    out.push_back({stem, seg.slice(offset, chunk_length), stem == target_stem});
  }
  return out;
}

TrainingExample augment_and_mix(const std::vector<SourceChunk>& sources, const MixSimConfig& cfg,
                                RandomSource& rng) {
  if (sources.empty()) throw Error(ErrorCode::kConfig, "no sources to mix");
  const AudioTrack& ref = sources.front().audio;
  for (const auto& s : sources) {
    if (!s.audio.same_shape(ref) || s.audio.sample_rate != ref.sample_rate) {
      throw Error(ErrorCode::kShape, "sources differ in shape or sample rate");
    }
  }

  TrainingExample ex;
  ex.mixture = AudioTrack::zeros(ref.num_channels(), ref.length(), ref.sample_rate);
  ex.target = ex.mixture;
  for (const auto& s : sources) {
    const double db = rng.uniform(-cfg.gain_db_range, cfg.gain_db_range);
    const bool drop = rng.bernoulli(cfg.drop_prob);
    ex.labels.push_back(s.label);
    ex.gain_db.push_back(db);
    ex.dropped.push_back(drop);
    if (drop) continue;
    const auto gain = static_cast<float>(gain_from_db(db));
    for (std::size_t c = 0; c < ref.num_channels(); ++c) {
      const auto& src = s.audio.channels[c];
      auto& mix = ex.mixture.channels[c];
      for (std::size_t i = 0; i < src.size(); ++i) mix[i] += gain * src[i];
      if (s.is_target) {
        auto& tgt = ex.target.channels[c];
        for (std::size_t i = 0; i < src.size(); ++i) tgt[i] += gain * src[i];
      }
    }
  }

  const float peak = std::max(ex.mixture.peak(), ex.target.peak());
  if (peak == 0.0f) {
    ex.silent = true;
    return ex;
  }
  ex.scale = peak;
  for (auto* t : {&ex.mixture, &ex.target}) {
    for (auto& ch : t->channels) {
      for (float& v : ch) v /= peak;
    }
  }
  return ex;
}

TrainingExample sample_training_example(const StemPool& pool, const std::string& target_stem,
                                        const MixSimConfig& cfg, RandomSource& rng) {
  pool.validate();
  const int sr = pool.segments(pool.stems().front()).front().sample_rate;
  const auto sources = draw_stem_chunks(pool, target_stem, chunk_samples(cfg.chunk_seconds, sr), rng);
  return augment_and_mix(sources, cfg, rng);
}

}  // namespace bsrnn
