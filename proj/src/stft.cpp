#include "bsrnn/stft.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "bsrnn/error.hpp"

namespace bsrnn {
namespace {

constexpr double kMinWindowSum = 1e-10;

void check_config(const StftConfig& cfg) {
  if (cfg.n_fft < 2 || cfg.n_fft % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_fft must be even and >= 2");
  }
  if (cfg.hop == 0 || cfg.hop > cfg.n_fft) {
    throw Error(ErrorCode::kInvalidArgument, "hop must be in [1, n_fft]");
  }
}

// Squared-window overlap for every sample of the padded signal.
std::vector<double> window_sum_square(const std::vector<double>& window, std::size_t hop,
                                      std::size_t frames) {
  const std::size_t n_fft = window.size();
  std::vector<double> wss((frames - 1) * hop + n_fft, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t n = 0; n < n_fft; ++n) wss[t * hop + n] += window[n] * window[n];
  }
  return wss;
}

}  // namespace

std::vector<double> hann_window(std::size_t n) {
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "hann window length must be even and >= 2");
  }
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)));
  }
  return w;
}

ComplexSpectrogram stft(std::span<const double> signal, const StftConfig& cfg, int sample_rate) {
  check_config(cfg);
  if (signal.empty()) throw Error(ErrorCode::kInvalidArgument, "stft input is empty");

  const std::size_t n_fft = cfg.n_fft;
  const std::size_t half = n_fft / 2;
  const std::size_t frames = cfg.num_frames(signal.size());
  const auto window = hann_window(n_fft);

  std::vector<double> padded((frames - 1) * cfg.hop + n_fft, 0.0);
  std::copy(signal.begin(), signal.end(), padded.begin() + static_cast<std::ptrdiff_t>(half));

  ComplexSpectrogram spec = ComplexSpectrogram::zeros(cfg, static_cast<Eigen::Index>(frames), sample_rate);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(n_fft);
  std::vector<std::complex<double>> out;
  for (std::size_t t = 0; t < frames; ++t) {
    const double* src = padded.data() + t * cfg.hop;
    for (std::size_t n = 0; n < n_fft; ++n) frame[n] = src[n] * window[n];
    fft.fwd(out, frame);
    for (std::size_t k = 0; k <= half; ++k) spec.bins(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) = out[k];
  }
  return spec;
}

ComplexSpectrogram stft(std::span<const float> signal, const StftConfig& cfg, int sample_rate) {
  std::vector<double> d(signal.begin(), signal.end());
  return stft(std::span<const double>(d), cfg, sample_rate);
}

std::vector<double> istft(const ComplexSpectrogram& spec, std::size_t target_length) {
  const StftConfig cfg = spec.config();
  check_config(cfg);
  const std::size_t n_fft = cfg.n_fft;
  const std::size_t half = n_fft / 2;
  if (spec.num_bins() != static_cast<Eigen::Index>(cfg.num_bins()) || spec.num_frames() < 1) {
    throw Error(ErrorCode::kShape, "spectrogram shape does not match its n_fft");
  }
  const auto frames = static_cast<std::size_t>(spec.num_frames());
  const auto window = hann_window(n_fft);
  const auto wss = window_sum_square(window, cfg.hop, frames);
  if (half + target_length > wss.size()) {
    throw Error(ErrorCode::kInvalidArgument, "target length exceeds the span covered by the frames");
  }

  std::vector<double> acc(wss.size(), 0.0);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> full(n_fft), time(n_fft);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto col = static_cast<Eigen::Index>(t);
    // Hermitian extension; DC and Nyquist are taken as real.
    full[0] = {spec.bins(0, col).real(), 0.0};
    full[half] = {spec.bins(static_cast<Eigen::Index>(half), col).real(), 0.0};
    for (std::size_t k = 1; k < half; ++k) {
      const auto v = spec.bins(static_cast<Eigen::Index>(k), col);
      full[k] = v;
      full[n_fft - k] = std::conj(v);
    }
    fft.inv(time, full);
    double* dst = acc.data() + t * cfg.hop;
    for (std::size_t n = 0; n < n_fft; ++n) dst[n] += time[n].real() * window[n];
  }

  std::vector<double> out(target_length);
  for (std::size_t i = 0; i < target_length; ++i) {
    const double norm = wss[half + i];
    if (norm < kMinWindowSum) {
      throw Error(ErrorCode::kNumericDegeneracy,
                  "window-sum-square below 1e-10 at output sample " + std::to_string(i));
    }
    out[i] = acc[half + i] / norm;
  }
  return out;
}

Eigen::MatrixXcd istft_adjoint(std::span<const double> grad, const StftConfig& cfg,
                               Eigen::Index frames) {
  check_config(cfg);
  const std::size_t n_fft = cfg.n_fft;
  const std::size_t half = n_fft / 2;
  const auto window = hann_window(n_fft);
  const auto wss = window_sum_square(window, cfg.hop, static_cast<std::size_t>(frames));
  if (half + grad.size() > wss.size()) {
    throw Error(ErrorCode::kInvalidArgument, "gradient length exceeds the span covered by the frames");
  }

  // Adjoint of crop + normalisation.
  std::vector<double> u(wss.size(), 0.0);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double norm = wss[half + i];
    if (norm < kMinWindowSum) {
      throw Error(ErrorCode::kNumericDegeneracy,
                  "window-sum-square below 1e-10 at output sample " + std::to_string(i));
    }
    u[half + i] = grad[i] / norm;
  }

  Eigen::MatrixXcd out(static_cast<Eigen::Index>(cfg.num_bins()), frames);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> v(n_fft);
  std::vector<std::complex<double>> spec;
  const double inv_n = 1.0 / static_cast<double>(n_fft);
  for (Eigen::Index t = 0; t < frames; ++t) {
    const double* src = u.data() + static_cast<std::size_t>(t) * cfg.hop;
    for (std::size_t n = 0; n < n_fft; ++n) v[n] = src[n] * window[n];
    fft.fwd(spec, v);
    // Adjoint of the Hermitian inverse DFT: interior bins appear twice.
    for (std::size_t k = 0; k <= half; ++k) {
      const double weight = (k == 0 || k == half) ? inv_n : 2.0 * inv_n;
      std::complex<double> g = spec[k] * weight;
      if (k == 0 || k == half) g.imag(0.0);
      out(static_cast<Eigen::Index>(k), t) = g;
    }
  }
  return out;
}

}  // namespace bsrnn
