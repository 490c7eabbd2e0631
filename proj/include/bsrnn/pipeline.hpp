#pragma once

#include <cstddef>
#include <vector>

#include "bsrnn/audio.hpp"
#include "bsrnn/separator.hpp"

namespace bsrnn {

struct InferenceConfig {
  double chunk_seconds = 3.0;
  double hop_seconds = 0.5;
  unsigned threads = 1;

  void validate() const;
};

// Runs one STFT -> separate -> iSTFT pass over each channel independently.
AudioTrack separate_waveform(const SpectrogramSeparator& separator, const AudioTrack& track);

// Full-song separation: pad chunk - hop seconds of zeros at both ends, cut
// chunks of chunk_seconds every hop_seconds, separate each one and average
// the overlapping outputs by coverage count. Output length equals input
// length. Results do not depend on the thread count.
AudioTrack separate_track(const SpectrogramSeparator& separator, const InferenceConfig& config,
                          const AudioTrack& track);

}  // namespace bsrnn
