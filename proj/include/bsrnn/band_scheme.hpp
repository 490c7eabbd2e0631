#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "bsrnn/stft.hpp"

namespace bsrnn {

enum class TailPolicy {
  kOneSubband,     // bins above the last edge become one extra band
  kMergeIntoLast,  // bins above the last edge widen the final band
};

// Frequencies from the previous edge up to `upper_hz` are cut into bands of
// `bandwidth_hz`; a remainder narrower than one bandwidth joins the last band
// of the span.
struct LedgerSpan {
  double upper_hz = 0.0;
  double bandwidth_hz = 0.0;
  bool operator==(const LedgerSpan&) const = default;
};

struct BandLedger {
  std::vector<LedgerSpan> spans;
  TailPolicy tail = TailPolicy::kOneSubband;

  void validate() const;

  // Text form: "1000:100,4000:250;tail=one-subband".
  std::string to_string() const;
  static BandLedger parse(std::string_view text);

  bool operator==(const BandLedger&) const = default;
};

struct Band {
  std::size_t start = 0;
  std::size_t width = 0;

  bool operator==(const Band&) const = default;
};

struct BandScheme {
  std::string name;
  std::vector<Band> bands;
  BandLedger ledger;
  std::size_t n_fft = 2048;
  int sample_rate = 44100;

  std::size_t num_bands() const { return bands.size(); }
  std::size_t num_bins() const { return n_fft / 2 + 1; }
};

BandScheme compile_scheme(const BandLedger& ledger, int sample_rate, std::size_t n_fft,
                          std::string name = "custom");

const std::vector<std::string>& builtin_scheme_names();
BandLedger builtin_ledger(std::string_view name);
BandScheme builtin_scheme(std::string_view name, int sample_rate = 44100, std::size_t n_fft = 2048);

std::vector<Eigen::MatrixXcd> split(const Eigen::MatrixXcd& spec, const BandScheme& scheme);
std::vector<Eigen::MatrixXcd> split(const ComplexSpectrogram& spec, const BandScheme& scheme);
Eigen::MatrixXcd merge(const std::vector<Eigen::MatrixXcd>& subbands, const BandScheme& scheme);

}  // namespace bsrnn
