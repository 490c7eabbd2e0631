#include "bsrnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsrnn/error.hpp"

namespace bsrnn {
namespace {

constexpr double kKink = 1e-12;

double sign_or_zero(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_pair(const AudioTrack& ref, const AudioTrack& est) {
  if (!ref.same_shape(est)) throw Error(ErrorCode::kShape, "reference and estimate differ in shape");
}

double sdr_from_energies(double signal, double noise) {
  if (noise == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal / noise);
}

}  // namespace

LossValue loss_obj(const ComplexSpectrogram& estimate, const ComplexSpectrogram& reference,
                   std::size_t target_length) {
  if (!estimate.same_layout(reference)) throw Error(ErrorCode::kShape, "loss: spectrogram shapes differ");
  LossValue v;
  const Eigen::MatrixXcd diff = estimate.bins - reference.bins;
  v.freq_real = diff.real().cwiseAbs().sum();
  v.freq_imag = diff.imag().cwiseAbs().sum();
  const auto y = istft(estimate, target_length);
  const auto y_ref = istft(reference, target_length);
  for (std::size_t i = 0; i < target_length; ++i) v.time += std::abs(y[i] - y_ref[i]);
  v.total = v.freq_real + v.freq_imag + v.time;
  return v;
}

MaskGradient loss_grad_mask(const ComplexSpectrogram& mixture, const Eigen::MatrixXcd& mask,
                            const ComplexSpectrogram& reference, std::size_t target_length) {
  if (!mixture.same_layout(reference) || mask.rows() != mixture.bins.rows() ||
      mask.cols() != mixture.bins.cols()) {
    throw Error(ErrorCode::kShape, "loss gradient: shapes differ");
  }
  ComplexSpectrogram estimate = mixture;
  estimate.bins = mask.cwiseProduct(mixture.bins);

  MaskGradient out;
  const Eigen::MatrixXcd diff = estimate.bins - reference.bins;
  Eigen::MatrixXcd grad_s(diff.rows(), diff.cols());
  for (Eigen::Index t = 0; t < diff.cols(); ++t) {
    for (Eigen::Index f = 0; f < diff.rows(); ++f) {
      const auto d = diff(f, t);
      const bool kink_r = std::abs(d.real()) < kKink;
      const bool kink_i = std::abs(d.imag()) < kKink;
      if (kink_r || kink_i) out.kink_bins.emplace_back(f, t);
      out.kink_terms += static_cast<std::size_t>(kink_r) + static_cast<std::size_t>(kink_i);
      grad_s(f, t) = {kink_r ? 0.0 : sign_or_zero(d.real()), kink_i ? 0.0 : sign_or_zero(d.imag())};
    }
  }

  const auto y = istft(estimate, target_length);
  const auto y_ref = istft(reference, target_length);
  std::vector<double> g_time(target_length);
  for (std::size_t i = 0; i < target_length; ++i) {
    const double d = y[i] - y_ref[i];
    if (std::abs(d) < kKink) {
      ++out.kink_terms;
      g_time[i] = 0.0;
    } else {
      g_time[i] = sign_or_zero(d);
    }
  }
  grad_s += istft_adjoint(g_time, mixture.config(), mixture.num_frames());

  // Chain rule through S = M * X.
  out.grad = mixture.bins.conjugate().cwiseProduct(grad_s);
  return out;
}

double usdr(const AudioTrack& reference, const AudioTrack& estimate) {
  check_pair(reference, estimate);
  double signal = 0.0;
  double noise = 0.0;
  for (std::size_t c = 0; c < reference.num_channels(); ++c) {
    for (std::size_t i = 0; i < reference.length(); ++i) {
      const double r = reference.channels[c][i];
      const double e = r - estimate.channels[c][i];
      signal += r * r;
      noise += e * e;
    }
  }
  if (signal == 0.0) throw Error(ErrorCode::kUndefinedMetric, "uSDR undefined for an all-zero reference");
  return sdr_from_energies(signal, noise);
}

CorpusScore usdr_mean(std::span<const double> per_song) {
  if (per_song.empty()) throw Error(ErrorCode::kUndefinedMetric, "uSDR corpus mean of zero songs");
  CorpusScore out;
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : per_song) {
    if (std::isinf(v)) {
      ++out.excluded;
      continue;
    }
    sum += v;
    ++n;
  }
  out.value = n ? sum / static_cast<double>(n) : std::numeric_limits<double>::infinity();
  return out;
}

CorpusScore usdr_corpus(std::span<const std::pair<AudioTrack, AudioTrack>> ref_est_pairs) {
  std::vector<double> scores;
  for (const auto& [ref, est] : ref_est_pairs) scores.push_back(usdr(ref, est));
  return usdr_mean(scores);
}

std::vector<double> chunk_sdrs(const AudioTrack& reference, const AudioTrack& estimate) {
  check_pair(reference, estimate);
  const auto chunk = static_cast<std::size_t>(reference.sample_rate);
  if (reference.length() < chunk) throw Error(ErrorCode::kUndefinedMetric, "cSDR needs at least one second");
  std::vector<double> out;
  for (std::size_t start = 0; start + chunk <= reference.length(); start += chunk) {
    double signal = 0.0;
    double noise = 0.0;
    for (std::size_t c = 0; c < reference.num_channels(); ++c) {
      for (std::size_t i = start; i < start + chunk; ++i) {
        const double r = reference.channels[c][i];
        const double e = r - estimate.channels[c][i];
        signal += r * r;
        noise += e * e;
      }
    }
    if (signal == 0.0) continue;
    out.push_back(sdr_from_energies(signal, noise));
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kUndefinedMetric, "median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double csdr_song(const AudioTrack& reference, const AudioTrack& estimate) {
  auto sdrs = chunk_sdrs(reference, estimate);
  if (sdrs.empty()) throw Error(ErrorCode::kUndefinedMetric, "every one-second reference chunk is silent");
  if (sdrs.size() == 1) return sdrs.front();
  for (double& v : sdrs) v = std::min(v, kSdrCapDb);
  return median(std::move(sdrs));
}

double csdr_corpus(std::span<const double> per_song) {
  return median({per_song.begin(), per_song.end()});
}

}  // namespace bsrnn
