#include "bsrnn/band_scheme.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "bsrnn/error.hpp"

namespace bsrnn {
namespace {

constexpr double kHzTolerance = 1e-9;

std::size_t hz_to_bin_edge(double hz, int sample_rate, std::size_t n_fft) {
  return static_cast<std::size_t>(std::floor(hz * static_cast<double>(n_fft) / sample_rate + 0.5));
}

double parse_number(std::string_view s, std::string_view context) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "bad number '" + std::string(s) + "' in ledger " + std::string(context));
  }
  return v;
}

std::string format_hz(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

}  // namespace

void BandLedger::validate() const {
  if (spans.empty()) throw Error(ErrorCode::kInvalidArgument, "ledger has no spans");
  double lower = 0.0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& s = spans[i];
    if (!(s.upper_hz > lower)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "ledger span " + std::to_string(i) + " upper edge is not increasing");
    }
    if (!(s.bandwidth_hz > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "ledger span " + std::to_string(i) + " has non-positive bandwidth");
    }
    if (s.bandwidth_hz > s.upper_hz - lower + kHzTolerance) {
      throw Error(ErrorCode::kInvalidArgument,
                  "ledger span " + std::to_string(i) + " bandwidth exceeds span width");
    }
    lower = s.upper_hz;
  }
}

std::string BandLedger::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (i) out += ',';
    out += format_hz(spans[i].upper_hz) + ':' + format_hz(spans[i].bandwidth_hz);
  }
  out += tail == TailPolicy::kOneSubband ? ";tail=one-subband" : ";tail=merge-into-last";
  return out;
}

BandLedger BandLedger::parse(std::string_view text) {
  BandLedger ledger;
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) {
    text.remove_suffix(1);
  }
  std::string_view spans = text;
  if (auto semi = text.find(';'); semi != std::string_view::npos) {
    spans = text.substr(0, semi);
    std::string_view policy = text.substr(semi + 1);
    if (policy == "tail=one-subband") {
      ledger.tail = TailPolicy::kOneSubband;
    } else if (policy == "tail=merge-into-last") {
      ledger.tail = TailPolicy::kMergeIntoLast;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown tail policy '" + std::string(policy) + "'");
    }
  }
  while (!spans.empty()) {
    auto comma = spans.find(',');
    std::string_view item = spans.substr(0, comma);
    auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument, "ledger item '" + std::string(item) + "' lacks ':'");
    }
    ledger.spans.push_back({parse_number(item.substr(0, colon), item),
                            parse_number(item.substr(colon + 1), item)});
    if (comma == std::string_view::npos) break;
    spans.remove_prefix(comma + 1);
  }
  ledger.validate();
  return ledger;
}

BandScheme compile_scheme(const BandLedger& ledger, int sample_rate, std::size_t n_fft,
                          std::string name) {
  ledger.validate();
  if (sample_rate <= 0) throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  if (n_fft < 2 || n_fft % 2 != 0) throw Error(ErrorCode::kInvalidArgument, "n_fft must be even");
  const std::size_t num_bins = n_fft / 2 + 1;

  // Hz edges of every band, excluding 0.
  std::vector<double> edges_hz;
  double lower = 0.0;
  for (const auto& span : ledger.spans) {
    const double width = span.upper_hz - lower;
    const auto count = static_cast<std::size_t>(std::floor(width / span.bandwidth_hz + kHzTolerance));
    for (std::size_t j = 1; j < count; ++j) {
      edges_hz.push_back(lower + static_cast<double>(j) * span.bandwidth_hz);
    }
    edges_hz.push_back(span.upper_hz);
    lower = span.upper_hz;
  }

  BandScheme scheme;
  scheme.name = std::move(name);
  scheme.ledger = ledger;
  scheme.n_fft = n_fft;
  scheme.sample_rate = sample_rate;

  auto degenerate = [&](std::size_t index, double lo_hz, double hi_hz) {
    return Error(ErrorCode::kDegenerateScheme,
                 "band " + std::to_string(index) + " (" + format_hz(lo_hz) + "-" + format_hz(hi_hz) +
                     " Hz) of scheme '" + scheme.name + "' compiles to zero bins");
  };

  std::size_t start = 0;
  double lo_hz = 0.0;
  for (double hi_hz : edges_hz) {
    const std::size_t end = std::min(hz_to_bin_edge(hi_hz, sample_rate, n_fft), num_bins);
    if (end <= start) throw degenerate(scheme.bands.size(), lo_hz, hi_hz);
    scheme.bands.push_back({start, end - start});
    start = end;
    lo_hz = hi_hz;
  }
  const double nyquist = sample_rate / 2.0;
  if (ledger.tail == TailPolicy::kOneSubband) {
    if (start >= num_bins) throw degenerate(scheme.bands.size(), lo_hz, nyquist);
    scheme.bands.push_back({start, num_bins - start});
  } else {
    scheme.bands.back().width = num_bins - scheme.bands.back().start;
  }
  return scheme;
}

const std::vector<std::string>& builtin_scheme_names() {
  static const std::vector<std::string> names = {"v1", "v2", "v3",   "v4",   "v5",
                                                 "v6", "v7", "bass", "drum", "other"};
  return names;
}

BandLedger builtin_ledger(std::string_view name) {
  using enum TailPolicy;
  if (name == "v1") return {{{22000, 1000}}, kMergeIntoLast};
  if (name == "v2") return {{{16000, 1000}, {20000, 2000}}, kOneSubband};
  if (name == "v3") return {{{8000, 1000}, {16000, 2000}, {20000, 4000}}, kOneSubband};
  if (name == "v4") return {{{1000, 100}, {8000, 1000}, {16000, 2000}, {20000, 4000}}, kOneSubband};
  if (name == "v5") return {{{1000, 100}, {16000, 1000}, {20000, 2000}}, kOneSubband};
  if (name == "v6") {
    return {{{1000, 100}, {4000, 500}, {8000, 1000}, {16000, 2000}, {20000, 4000}}, kOneSubband};
  }
  if (name == "v7" || name == "other") {
    return {{{1000, 100}, {4000, 250}, {8000, 500}, {16000, 1000}, {20000, 2000}}, kOneSubband};
  }
  if (name == "bass") {
    return {{{500, 50}, {1000, 100}, {4000, 500}, {8000, 1000}, {16000, 2000}}, kOneSubband};
  }
  if (name == "drum") {
    return {{{1000, 50}, {2000, 100}, {4000, 250}, {8000, 500}, {16000, 1000}}, kOneSubband};
  }
  std::string valid;
  for (const auto& n : builtin_scheme_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::kLookup, "unknown band scheme '" + std::string(name) + "'; valid names: " + valid);
}

BandScheme builtin_scheme(std::string_view name, int sample_rate, std::size_t n_fft) {
  return compile_scheme(builtin_ledger(name), sample_rate, n_fft, std::string(name));
}

std::vector<Eigen::MatrixXcd> split(const Eigen::MatrixXcd& spec, const BandScheme& scheme) {
  if (static_cast<std::size_t>(spec.rows()) != scheme.num_bins()) {
    throw Error(ErrorCode::kShape, "spectrogram has " + std::to_string(spec.rows()) +
                                       " bins, scheme expects " + std::to_string(scheme.num_bins()));
  }
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(scheme.bands.size());
  for (const auto& band : scheme.bands) {
    out.emplace_back(spec.middleRows(static_cast<Eigen::Index>(band.start), static_cast<Eigen::Index>(band.width)));
  }
  return out;
}

std::vector<Eigen::MatrixXcd> split(const ComplexSpectrogram& spec, const BandScheme& scheme) {
  if (spec.n_fft != scheme.n_fft) throw Error(ErrorCode::kShape, "spectrogram n_fft differs from scheme");
  return split(spec.bins, scheme);
}

Eigen::MatrixXcd merge(const std::vector<Eigen::MatrixXcd>& subbands, const BandScheme& scheme) {
  if (subbands.size() != scheme.bands.size()) {
    throw Error(ErrorCode::kShape, "expected " + std::to_string(scheme.bands.size()) + " subbands, got " +
                                       std::to_string(subbands.size()));
  }
  const Eigen::Index frames = subbands.empty() ? 0 : subbands.front().cols();
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(scheme.num_bins()), frames);
  for (std::size_t i = 0; i < subbands.size(); ++i) {
    const auto& band = scheme.bands[i];
    if (subbands[i].rows() != static_cast<Eigen::Index>(band.width) || subbands[i].cols() != frames) {
      throw Error(ErrorCode::kShape, "subband " + std::to_string(i) + " has shape " +
                                         std::to_string(subbands[i].rows()) + "x" +
                                         std::to_string(subbands[i].cols()) + ", expected " +
                                         std::to_string(band.width) + "x" + std::to_string(frames));
    }
    out.middleRows(static_cast<Eigen::Index>(band.start), static_cast<Eigen::Index>(band.width)) = subbands[i];
  }
  return out;
}

}  // namespace bsrnn
