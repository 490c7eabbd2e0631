#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace bsrnn {

struct StftConfig {
  std::size_t n_fft = 2048;
  std::size_t hop = 512;

  std::size_t num_bins() const { return n_fft / 2 + 1; }
  // Center convention: one frame per hop plus the frame centred on sample 0.
  std::size_t num_frames(std::size_t signal_length) const { return signal_length / hop + 1; }
};

// One-sided complex spectrogram, F = n_fft/2 + 1 rows by T frame columns.
struct ComplexSpectrogram {
  Eigen::MatrixXcd bins;
  std::size_t n_fft = 2048;
  std::size_t hop = 512;
  int sample_rate = 44100;

  StftConfig config() const { return {n_fft, hop}; }
  Eigen::Index num_bins() const { return bins.rows(); }
  Eigen::Index num_frames() const { return bins.cols(); }

  static ComplexSpectrogram zeros(const StftConfig& cfg, Eigen::Index frames, int sample_rate = 44100) {
    ComplexSpectrogram s;
    s.bins = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(cfg.num_bins()), frames);
    s.n_fft = cfg.n_fft;
    s.hop = cfg.hop;
    s.sample_rate = sample_rate;
    return s;
  }

  bool same_layout(const ComplexSpectrogram& o) const {
    return n_fft == o.n_fft && hop == o.hop && bins.rows() == o.bins.rows() &&
           bins.cols() == o.bins.cols();
  }
};

// Periodic Hann window, w[k] = 0.5 (1 - cos(2 pi k / n)).
std::vector<double> hann_window(std::size_t n);

ComplexSpectrogram stft(std::span<const double> signal, const StftConfig& cfg = {},
                        int sample_rate = 44100);
ComplexSpectrogram stft(std::span<const float> signal, const StftConfig& cfg = {},
                        int sample_rate = 44100);

// Windowed overlap-add divided by the window-sum-square; the padding added by
// stft() is removed and the result has exactly target_length samples.
std::vector<double> istft(const ComplexSpectrogram& spec, std::size_t target_length);

// Adjoint of istft() taken as a real-linear map from (Re, Im) of every bin to
// the target_length waveform: returns dOut/dRe + i dOut/dIm contracted with
// `grad`.
Eigen::MatrixXcd istft_adjoint(std::span<const double> grad, const StftConfig& cfg,
                               Eigen::Index frames);

}  // namespace bsrnn
