#pragma once

#include "bsrnn/stft.hpp"

namespace bsrnn {

// Anything that maps a mixture spectrogram to a target spectrogram. The
// chunked inference driver and the semi-supervised sampler only see this.
class SpectrogramSeparator {
 public:
  virtual ~SpectrogramSeparator() = default;
  virtual ComplexSpectrogram separate(const ComplexSpectrogram& mixture) const = 0;
  virtual StftConfig stft_config() const { return {}; }
  virtual int sample_rate() const { return 44100; }
};

// Elementwise complex masking S = M * X.
Eigen::MatrixXcd apply_mask(const Eigen::MatrixXcd& mask, const Eigen::MatrixXcd& mixture);

// Separator whose mask is 1 + 0i everywhere.
class IdentityMaskSeparator final : public SpectrogramSeparator {
 public:
  explicit IdentityMaskSeparator(StftConfig cfg = {}, int sample_rate = 44100)
      : cfg_(cfg), sample_rate_(sample_rate) {}

  ComplexSpectrogram separate(const ComplexSpectrogram& mixture) const override {
    ComplexSpectrogram out = mixture;
    out.bins = apply_mask(Eigen::MatrixXcd::Ones(mixture.bins.rows(), mixture.bins.cols()), mixture.bins);
    return out;
  }
  StftConfig stft_config() const override { return cfg_; }
  int sample_rate() const override { return sample_rate_; }

 private:
  StftConfig cfg_;
  int sample_rate_;
};

}  // namespace bsrnn
