#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bsrnn/error.hpp"

namespace bsrnn {

// Planar multichannel waveform. All channels share one length.
struct AudioTrack {
  std::vector<std::vector<float>> channels;
  int sample_rate = 44100;

  static AudioTrack zeros(std::size_t num_channels, std::size_t length, int sample_rate) {
    AudioTrack t;
    t.channels.assign(num_channels, std::vector<float>(length, 0.0f));
    t.sample_rate = sample_rate;
    return t;
  }

  std::size_t num_channels() const { return channels.size(); }
  std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
  double duration() const { return static_cast<double>(length()) / sample_rate; }

  void validate() const {
    if (sample_rate <= 0) {
      throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
    }
    if (channels.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "track has no channels");
    }
    for (const auto& ch : channels) {
      if (ch.size() != channels.front().size()) {
        throw Error(ErrorCode::kShape, "channels have different lengths");
      }
    }
  }

  float peak() const {
    float p = 0.0f;
    for (const auto& ch : channels) {
      for (float v : ch) p = std::max(p, std::abs(v));
    }
    return p;
  }

  // Sum of squares over all samples and channels.
  double energy() const {
    double e = 0.0;
    for (const auto& ch : channels) {
      for (float v : ch) e += static_cast<double>(v) * v;
    }
    return e;
  }

  AudioTrack slice(std::size_t begin, std::size_t length) const {
    if (begin + length > this->length()) {
      throw Error(ErrorCode::kInvalidArgument, "slice exceeds track bounds");
    }
    AudioTrack out;
    out.sample_rate = sample_rate;
    out.channels.reserve(channels.size());
    for (const auto& ch : channels) {
      out.channels.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(begin),
                                ch.begin() + static_cast<std::ptrdiff_t>(begin + length));
    }
    return out;
  }

  void scale(float factor) {
    for (auto& ch : channels) {
      for (float& v : ch) v *= factor;
    }
  }

  bool same_shape(const AudioTrack& other) const {
    return num_channels() == other.num_channels() && length() == other.length();
  }
};

}  // namespace bsrnn
