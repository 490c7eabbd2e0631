#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bsrnn/audio.hpp"
#include "bsrnn/stft.hpp"

namespace bsrnn {

// Training objective: unnormalised L1 over real parts, imaginary parts and
// the reconstructed waveforms.
struct LossValue {
  double total = 0.0;
  double freq_real = 0.0;
  double freq_imag = 0.0;
  double time = 0.0;
};

LossValue loss_obj(const ComplexSpectrogram& estimate, const ComplexSpectrogram& reference,
                   std::size_t target_length);

struct MaskGradient {
  Eigen::MatrixXcd grad;      // dL/dRe(M) + i dL/dIm(M)
  std::size_t kink_terms = 0; // L1 terms with |difference| < 1e-12 (sign taken as 0)
  std::vector<std::pair<Eigen::Index, Eigen::Index>> kink_bins;  // frequency-domain kinks
};

// Subgradient of loss_obj(M * X, reference) with respect to M.
MaskGradient loss_grad_mask(const ComplexSpectrogram& mixture, const Eigen::MatrixXcd& mask,
                            const ComplexSpectrogram& reference, std::size_t target_length);

inline constexpr double kSdrCapDb = 100.0;

// Utterance-level SDR over all samples and channels. A perfect estimate
// yields +infinity.
double usdr(const AudioTrack& reference, const AudioTrack& estimate);

struct CorpusScore {
  double value = 0.0;
  std::size_t excluded = 0;  // infinite per-song values left out of the mean
};

// Mean of per-song uSDR, ignoring infinite values.
CorpusScore usdr_mean(std::span<const double> per_song);
CorpusScore usdr_corpus(std::span<const std::pair<AudioTrack, AudioTrack>> ref_est_pairs);

// Per-second chunk SDRs of a song, start aligned, trailing partial second
// dropped, silent-reference chunks skipped.
std::vector<double> chunk_sdrs(const AudioTrack& reference, const AudioTrack& estimate);

// Median of chunk_sdrs() with +inf capped at 100 dB; a single chunk is
// reported uncapped.
double csdr_song(const AudioTrack& reference, const AudioTrack& estimate);
double csdr_corpus(std::span<const double> per_song);

double median(std::vector<double> values);

}  // namespace bsrnn
