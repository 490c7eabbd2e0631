// Acceptance gate: one PASS/FAIL line per criterion. A criterion passes only
// if its checks hold and it finishes inside its runtime budget.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bsrnn/band_scheme.hpp"
#include "bsrnn/error.hpp"
#include "bsrnn/metrics.hpp"
#include "bsrnn/mixsim.hpp"
#include "bsrnn/model.hpp"
#include "bsrnn/pipeline.hpp"
#include "bsrnn/sad.hpp"
#include "bsrnn/semisup.hpp"
#include "bsrnn/stft.hpp"
#include "bsrnn/weights_io.hpp"

using namespace bsrnn;

namespace {

constexpr int kRate = 44100;
const std::vector<std::string> kNineSchemes{"v1", "v2", "v3", "v4", "v5", "v6", "v7", "bass", "drum"};

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

AudioTrack noise_track(std::size_t channels, std::size_t n, std::uint64_t seed, float amp, int rate = kRate) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> d(-amp, amp);
  auto t = AudioTrack::zeros(channels, n, rate);
  for (auto& ch : t.channels) {
    for (auto& v : ch) v = d(rng);
  }
  return t;
}

AudioTrack sign_track(std::size_t n, float level, std::uint64_t seed, int rate) {
  std::mt19937_64 rng(seed);
  auto t = AudioTrack::zeros(1, n, rate);
  for (auto& v : t.channels[0]) v = (rng() & 1) ? level : -level;
  return t;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome schemes() {
  Outcome o;
  const std::map<std::string, std::size_t> expected{{"v1", 22}, {"v2", 19}, {"v3", 14},  {"v4", 23}, {"v5", 28},
                                                    {"v6", 26}, {"v7", 41}, {"bass", 30}, {"drum", 55}};
  std::string counts;
  for (const auto& [name, k] : expected) {
    const auto s = builtin_scheme(name);
    std::size_t total = 0;
    for (const auto& b : s.bands) total += b.width;
    o.require(s.num_bands() == k, name + " has K=" + std::to_string(s.num_bands()));
    o.require(total == 1025, name + " covers " + std::to_string(total) + " bins");
  }
  if (o.ok) o.detail = "all nine K values match, sum G = 1025";
  return o;
}

Outcome stft_reconstruction() {
  Outcome o;
  const auto x = noise(3 * kRate, 1);
  const auto y = istft(stft(x), x.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (y[i] - x[i]) * (y[i] - x[i]);
    den += x[i] * x[i];
  }
  const double err = std::sqrt(num / den);
  o.require(err <= 1e-6, "relative L2 error " + fmt("%.3e", err));
  if (o.ok) o.detail = "relative L2 error " + fmt("%.3e", err) + " <= 1e-6";
  return o;
}

Outcome split_merge() {
  Outcome o;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::MatrixXcd x(1025, 37);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = {d(rng), d(rng)};
  for (const auto& name : kNineSchemes) {
    const auto s = builtin_scheme(name);
    o.require(merge(split(x, s), s) == x, name + " merge(split(X)) differs from X");
  }
  if (o.ok) o.detail = "bit exact for nine schemes";
  return o;
}

Outcome identity_mask_pipeline() {
  Outcome o;
  ModelConfig cfg;
  cfg.scheme = builtin_scheme("v7");
  cfg.feature_dim = 8;
  cfg.num_blocks = 1;
  cfg.lstm_hidden = 8;
  ModelWeights w = init_weights(cfg, 1);
  // fc2 emits [real = 1, imag = 0, gate = 100] so the GLU passes 1 + 0i.
  for (std::size_t i = 0; i < cfg.scheme.num_bands(); ++i) {
    const std::string p = "mask." + std::to_string(i) + ".fc2";
    auto& weight = w.get(p + ".weight").data;
    std::fill(weight.begin(), weight.end(), 0.0f);
    auto& bias = w.get(p + ".bias").data;
    const std::size_t g = cfg.scheme.bands[i].width;
    for (std::size_t r = 0; r < 4 * g; ++r) bias[r] = r < g ? 1.0f : (r < 2 * g ? 0.0f : 100.0f);
  }
  const BsrnnModel model(cfg, std::move(w));
  const auto track = noise_track(1, 10 * kRate, 3, 0.8f);
  double worst = 0.0;
  for (double hop : {0.5, 1.0, 1.5, 3.0}) {
    InferenceConfig inf;
    inf.hop_seconds = hop;
    const auto out = separate_track(model, inf, track);
    o.require(out.same_shape(track), "output length changed at hop " + fmt("%.1f", hop));
    if (!o.ok) return o;
    double err = 0.0;
    for (std::size_t i = 0; i < track.length(); ++i) {
      err = std::max(err, std::abs(double(out.channels[0][i]) - track.channels[0][i]));
    }
    o.require(err <= 1e-5, "max abs error " + fmt("%.3e", err) + " at hop " + fmt("%.1f", hop));
    worst = std::max(worst, err);
  }
  if (o.ok) o.detail = "max abs error " + fmt("%.3e", worst) + " <= 1e-5 for hops 0.5/1/1.5/3 s";
  return o;
}

Outcome forward_contract() {
  Outcome o;
  ModelConfig cfg;
  cfg.scheme = builtin_scheme("v7");
  const ModelWeights w = init_weights(cfg, 7);
  std::uint64_t enumerated = 0;
  for (const auto& [name, t] : w.tensors()) enumerated += t.data.size();
  o.require(param_count(cfg) == enumerated, "param_count " + std::to_string(param_count(cfg)) +
                                                " != enumerated " + std::to_string(enumerated));
  const BsrnnModel model(cfg, w);
  const auto x = stft(noise(3 * kRate, 8));
  const auto m1 = model.estimate_mask(x);
  const auto m2 = model.estimate_mask(x);
  o.require(m1.rows() == 1025 && m1.cols() == 259,
            "mask shape " + std::to_string(m1.rows()) + "x" + std::to_string(m1.cols()));
  o.require(m1.allFinite(), "mask has non-finite entries");
  o.require(m1 == m2, "two runs differ");
  if (o.ok) o.detail = "mask 1025x259 finite and repeatable, " + std::to_string(enumerated) + " parameters";
  return o;
}

Outcome loss_gradient() {
  Outcome o;
  const StftConfig toy{16, 4};
  const std::size_t len = 12;
  const Eigen::Index frames = 4;
  auto random_spec = [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    auto s = ComplexSpectrogram::zeros(toy, frames);
    for (Eigen::Index i = 0; i < s.bins.size(); ++i) s.bins(i) = {d(rng), d(rng)};
    return s;
  };
  auto masked = [&](const ComplexSpectrogram& x, const Eigen::MatrixXcd& m, const ComplexSpectrogram& ref) {
    ComplexSpectrogram s = x;
    s.bins = m.cwiseProduct(x.bins);
    return loss_obj(s, ref, len).total;
  };

  std::mt19937_64 rng(11);
  const auto a = random_spec(rng), b = random_spec(rng);
  o.require(loss_obj(a, a, len).total == 0.0, "loss not zero at equality");
  const double base = loss_obj(a, b, len).total;
  for (double alpha : {-3.0, 0.5, 4.0}) {
    auto sa = a, sb = b;
    sa.bins *= alpha;
    sb.bins *= alpha;
    const double rel = std::abs(loss_obj(sa, sb, len).total - std::abs(alpha) * base) / (std::abs(alpha) * base);
    o.require(rel <= 1e-9, "homogeneity error " + fmt("%.3e", rel));
  }

  std::size_t checked = 0, agreed = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const auto x = random_spec(rng);
    const auto ref = random_spec(rng);
    const Eigen::MatrixXcd m = random_spec(rng).bins;
    const auto g = loss_grad_mask(x, m, ref, len);
    std::vector<bool> kink(static_cast<std::size_t>(m.size()), false);
    for (const auto& [f, t] : g.kink_bins) kink[static_cast<std::size_t>(t * m.rows() + f)] = true;
    const double h = 1e-4;
    for (Eigen::Index t = 0; t < frames; ++t) {
      for (Eigen::Index f = 0; f < m.rows(); ++f) {
        if (kink[static_cast<std::size_t>(t * m.rows() + f)]) continue;
        for (int part = 0; part < 2; ++part) {
          const std::complex<double> step = part == 0 ? std::complex<double>(h, 0) : std::complex<double>(0, h);
          Eigen::MatrixXcd mp = m, mm = m;
          mp(f, t) += step;
          mm(f, t) -= step;
          const double fd = (masked(x, mp, ref) - masked(x, mm, ref)) / (2 * h);
          const double an = part == 0 ? g.grad(f, t).real() : g.grad(f, t).imag();
          const double scale = std::max(std::abs(fd), std::abs(an));
          const double rel = scale == 0.0 ? 0.0 : std::abs(fd - an) / scale;
          ++checked;
          if (rel <= 1e-4) ++agreed;
        }
      }
    }
  }
  const double frac = static_cast<double>(agreed) / static_cast<double>(checked);
  o.require(frac >= 0.95, "only " + fmt("%.4f", frac) + " of coordinates agree");
  if (o.ok) {
    o.detail = "homogeneous within 1e-9; " + std::to_string(agreed) + "/" + std::to_string(checked) +
               " coordinates within 1e-4 of central differences";
  }
  return o;
}

Outcome metrics_oracle() {
  Outcome o;
  // Integer-valued signals make the 1:100 energy ratio exact.
  const auto ref = sign_track(20000, 10.0f, 1, kRate);
  const auto n = sign_track(20000, 1.0f, 2, kRate);
  auto est = ref;
  for (std::size_t i = 0; i < ref.length(); ++i) est.channels[0][i] += n.channels[0][i];
  const double u = usdr(ref, est);
  o.require(std::abs(u - 20.0) <= 1e-6, "usdr " + fmt("%.9f", u));

  // Three one-second chunks at 10, 20 and 30 dB; with rate 100 a chunk is
  // 100 samples and noise is a +-level square wave.
  const int rate = 100;
  auto song = sign_track(300, 10.0f, 3, rate);
  auto song_est = song;
  const double levels[3] = {std::sqrt(10.0), 1.0, std::sqrt(0.1)};
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < 100; ++i) {
      song_est.channels[0][c * 100 + i] += static_cast<float>((i % 2 ? 1.0 : -1.0) * levels[c]);
    }
  }
  const double three = csdr_song(song, song_est);
  o.require(three == 20.0, "csdr of {10,20,30} chunks is " + fmt("%.9f", three));
  auto half = sign_track(400, 10.0f, 4, rate);
  auto half_est = half;
  for (std::size_t i = 200; i < 400; ++i) half_est.channels[0][i] = 0.0f;
  const double capped = csdr_song(half, half_est);
  o.require(capped == 50.0, "csdr of {inf,inf,0,0} chunks is " + fmt("%.9f", capped));

  // Ideal complex mask on a synthetic two-stem mixture.
  const auto s1 = noise_track(1, 3 * kRate, 5, 0.5f);
  const auto s2 = noise_track(1, 3 * kRate, 6, 0.5f);
  auto mix = s1;
  for (std::size_t i = 0; i < mix.length(); ++i) mix.channels[0][i] += s2.channels[0][i];
  const auto x = stft(std::span<const float>(mix.channels[0]));
  const auto target = stft(std::span<const float>(s1.channels[0]));
  Eigen::MatrixXcd mask = Eigen::MatrixXcd::Zero(x.bins.rows(), x.bins.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    if (std::abs(x.bins(i)) > 0.0) mask(i) = target.bins(i) / x.bins(i);
  }
  ComplexSpectrogram sep = x;
  sep.bins = apply_mask(mask, x.bins);
  const auto y = istft(sep, mix.length());
  auto est1 = AudioTrack::zeros(1, mix.length(), kRate);
  for (std::size_t i = 0; i < y.size(); ++i) est1.channels[0][i] = static_cast<float>(y[i]);
  const double ideal = usdr(s1, est1);
  o.require(ideal >= 40.0, "ideal mask usdr " + fmt("%.2f", ideal));
  if (o.ok) {
    o.detail = "usdr " + fmt("%.9f", u) + " dB; csdr 20 and 50 exact; ideal mask " +
               (std::isinf(ideal) ? std::string("inf") : fmt("%.1f", ideal)) + " dB";
  }
  return o;
}

Outcome sad() {
  Outcome o;
  auto t = AudioTrack::zeros(1, 24 * kRate, kRate);
  for (std::size_t i = 0; i < std::size_t(12 * kRate); ++i) {
    t.channels[0][12 * kRate + i] = static_cast<float>(std::sin(2.0 * M_PI * 441.0 * double(i) / kRate));
  }
  const auto r = detect_salient_segments(t);
  const std::vector<SalientSegment> expected{
      {12 * kRate, 6 * kRate}, {15 * kRate, 6 * kRate}, {18 * kRate, 6 * kRate}};
  std::ostringstream got;
  for (const auto& s : r.segments) got << double(s.start) / kRate << "s ";
  o.require(r.grid_segments == 7, "grid has " + std::to_string(r.grid_segments) + " segments");
  o.require(r.segments == expected, "salient starts " + got.str());
  if (o.ok) o.detail = "salient starts 12 s, 15 s, 18 s; 9 s segment (5/10 chunks) rejected";
  return o;
}

Outcome semisup_routing() {
  Outcome o;
  const int rate = 8000;
  const auto target = noise_track(1, 2 * rate, 1, 0.5f, rate);
  const auto other = noise_track(1, 2 * rate, 2, 0.5f, rate);
  auto build = [&](float t_level, float r_level) {
    auto t = target, r = other;
    t.scale(t_level);
    r.scale(r_level);
    auto m = t;
    for (std::size_t i = 0; i < m.length(); ++i) m.channels[0][i] += r.channels[0][i];
    return std::pair{m, t};
  };
  struct Case {
    const char* name;
    float t_level, r_level;
    SampleClass expected;
  };
  // 0.01 amplitude is -40 dB; 0.1 is -20 dB.
  const Case cases[] = {{"silent target", 0.0f, 1.0f, SampleClass::kCleanResidual},
                        {"-40 dB target", 0.01f, 1.0f, SampleClass::kCleanResidual},
                        {"silent residual", 1.0f, 0.0f, SampleClass::kCleanTarget},
                        {"-40 dB residual", 1.0f, 0.01f, SampleClass::kCleanTarget},
                        {"-20 dB target", 0.1f, 1.0f, SampleClass::kPseudoPair},
                        {"balanced", 1.0f, 1.0f, SampleClass::kPseudoPair}};
  for (const auto& c : cases) {
    const auto [mix, sep_target] = build(c.t_level, c.r_level);
    const auto sep_residual = subtract(mix, sep_target);
    for (float scale : {0.1f, 1.0f, 10.0f}) {
      auto m = mix, t = sep_target, r = sep_residual;
      m.scale(scale);
      t.scale(scale);
      r.scale(scale);
      const auto cls = classify_separated(m, t, r, 30.0).cls;
      o.require(cls == c.expected, std::string(c.name) + " classified " + sample_class_name(cls) + " at scale " +
                                       fmt("%.1f", scale));
    }
  }

  // Routing inside the sampler with an oracle separator.
  StemPool pool;
  pool.add("vocals", noise_track(1, rate, 3, 0.4f, rate));
  pool.add("bass", noise_track(1, rate, 4, 0.4f, rate));
  FinetuneConfig cfg;
  cfg.mix.chunk_seconds = 0.5;
  for (const auto& c : cases) {
    const auto [mix, sep_target] = build(c.t_level, c.r_level);
    const std::vector<AudioTrack> unlabeled{mix};
    const SeparatorHandle oracle = [&mix, &sep_target](const AudioTrack& chunk) {
      for (std::size_t off = 0; off + chunk.length() <= mix.length(); ++off) {
        if (std::equal(chunk.channels[0].begin(), chunk.channels[0].end(),
                       mix.channels[0].begin() + static_cast<std::ptrdiff_t>(off))) {
          return sep_target.slice(off, chunk.length());
        }
      }
      throw Error(ErrorCode::kInvalidArgument, "chunk not found");
    };
    SeededRandom rng(9);
    const auto fx = sample_finetune_example(pool, unlabeled, "vocals", oracle, cfg, rng);
    const auto cls = fx.unlabeled.at(0).classification.cls;
    o.require(cls == c.expected, std::string(c.name) + " routed as " + sample_class_name(cls));
    const bool residual_raw = fx.residual_candidates.size() == 2 && fx.residual_candidates[1].origin == "unlabeled-mixture";
    const bool target_raw = fx.target_candidates.size() == 2 && fx.target_candidates[1].origin == "unlabeled-mixture";
    const bool pseudo = fx.target_candidates.size() == 2 && fx.target_candidates[1].origin == "pseudo" &&
                        fx.residual_candidates.size() == 2 && fx.residual_candidates[1].origin == "pseudo";
    if (c.expected == SampleClass::kCleanResidual) o.require(residual_raw && fx.target_candidates.size() == 1, std::string(c.name) + " candidate sets wrong");
    if (c.expected == SampleClass::kCleanTarget) o.require(target_raw && fx.residual_candidates.size() == 1, std::string(c.name) + " candidate sets wrong");
    if (c.expected == SampleClass::kPseudoPair) o.require(pseudo, std::string(c.name) + " candidate sets wrong");
  }
  if (o.ok) o.detail = "6 oracle cases routed per the 30 dB rule, stable under scales 0.1/1/10";
  return o;
}

Outcome mixsim() {
  Outcome o;
  const int rate = 8000;
  StemPool pool;
  std::uint64_t seed = 100;
  for (const char* stem : {"vocals", "bass", "drums", "other"}) {
    for (int i = 0; i < 4; ++i) pool.add(stem, noise_track(1, 6 * rate, ++seed, 0.4f, rate));
  }
  MixSimConfig cfg;
  cfg.chunk_seconds = 3.0;
  const std::size_t len = chunk_samples(cfg.chunk_seconds, rate);
  std::map<std::string, std::size_t> drops;
  const std::size_t count = 1000;
  double worst_peak = 0.0, worst_add = 0.0;
  for (std::size_t e = 0; e < count; ++e) {
    SeededRandom rng(derive_seed(2024, e));
    const auto sources = draw_stem_chunks(pool, "vocals", len, rng);
    const auto ex = augment_and_mix(sources, cfg, rng);
    for (std::size_t s = 0; s < sources.size(); ++s) drops[ex.labels[s]] += ex.dropped[s] ? 1 : 0;
    if (ex.silent) {
      o.require(ex.mixture.peak() == 0.0f && ex.target.peak() == 0.0f, "silent example is not silent");
      continue;
    }
    const double peak = std::max(ex.mixture.peak(), ex.target.peak());
    worst_peak = std::max(worst_peak, std::abs(peak - 1.0));
    for (std::size_t i = 0; i < len; i += 3) {
      double others = 0.0;
      for (std::size_t s = 1; s < sources.size(); ++s) {
        if (!ex.dropped[s]) others += gain_from_db(ex.gain_db[s]) * sources[s].audio.channels[0][i];
      }
      const double diff = double(ex.mixture.channels[0][i]) - ex.target.channels[0][i] - others / ex.scale;
      worst_add = std::max(worst_add, std::abs(diff));
    }
  }
  o.require(worst_peak <= 1.2e-7, "peak normalisation off by " + fmt("%.3e", worst_peak));
  o.require(worst_add <= 1e-5, "mixture minus target deviates by " + fmt("%.3e", worst_add));
  std::string rates;
  for (const auto& [stem, n] : drops) {
    const double r = static_cast<double>(n) / count;
    o.require(r >= 0.07 && r <= 0.13, stem + " drop rate " + fmt("%.3f", r));
    rates += stem + "=" + fmt("%.3f", r) + " ";
  }
  if (o.ok) o.detail = "1000 examples normalised and additive; drop rates " + rates;
  return o;
}

Outcome weight_container() {
  Outcome o;
  ModelConfig cfg;
  cfg.scheme = builtin_scheme("v7");
  cfg.feature_dim = 16;
  cfg.num_blocks = 2;
  cfg.lstm_hidden = 16;
  const auto w = init_weights(cfg, 5);
  const auto dir = std::filesystem::temp_directory_path() / ("bsrnn_acceptance_" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  save_weights(w, cfg, dir / "m.bsrw");
  const auto [w2, cfg2] = load_weights(dir / "m.bsrw");
  o.require(w2 == w, "loaded tensors differ");
  o.require(cfg2.scheme.bands == cfg.scheme.bands && cfg2.feature_dim == 16 && cfg2.num_blocks == 2 &&
                cfg2.lstm_hidden == 16,
            "loaded config differs");
  save_weights(w2, cfg2, dir / "again.bsrw");
  o.require(read_file_bytes(dir / "m.bsrw") == read_file_bytes(dir / "again.bsrw"), "re-saved file differs");

  auto bytes = read_file_bytes(dir / "m.bsrw");
  bytes[bytes.size() / 2] ^= 0x04;
  try {
    decode_weights(bytes);
    o.require(false, "corrupted byte accepted");
  } catch (const Error& e) {
    o.require(e.code() == ErrorCode::kChecksum, std::string("corruption gave ") + error_code_name(e.code()));
  }

  std::vector<NamedTensor> tensors;
  for (const auto& spec : tensor_layout(cfg)) {
    if (spec.name != "block.1.band.blstm.bw.w_hh") tensors.emplace_back(spec.name, w.get(spec.name));
  }
  const ContainerHeader header{cfg.scheme.name, cfg.scheme.ledger.to_string(), 16, 2, 16};
  try {
    decode_weights(encode_container(header, tensors));
    o.require(false, "missing tensor accepted");
  } catch (const Error& e) {
    o.require(e.code() == ErrorCode::kMissingTensor, std::string("missing tensor gave ") + error_code_name(e.code()));
    o.require(std::string(e.what()).find("block.1.band.blstm.bw.w_hh") != std::string::npos,
              std::string("diagnostic does not name the tensor: ") + e.what());
  }
  std::error_code ec;
  std::filesystem::remove_all(dir, ec);
  if (o.ok) o.detail = "round trip bit identical; checksum and missing-tensor diagnostics raised";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"scheme-constants", 1.0, schemes},
      {"stft-reconstruction", 1.0, stft_reconstruction},
      {"split-merge-identity", 1.0, split_merge},
      {"identity-mask-end-to-end", 30.0, identity_mask_pipeline},
      {"forward-pass-contract", 60.0, forward_contract},
      {"loss-gradient", 30.0, loss_gradient},
      {"metrics-oracle", 10.0, metrics_oracle},
      {"sad-half-silent", 5.0, sad},
      {"semisup-routing", 5.0, semisup_routing},
      {"mixsim-invariants", 30.0, mixsim},
      {"weight-container", 5.0, weight_container},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.ok && in_time;
    if (!pass) ++failures;
    std::printf("%s %-26s %6.2fs (limit %.0fs)  %s%s\n", pass ? "PASS" : "FAIL", c.name, secs, c.limit_s,
                o.detail.c_str(), in_time ? "" : "  [over time limit]");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
