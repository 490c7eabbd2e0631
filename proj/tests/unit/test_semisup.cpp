#include <doctest.h>

#include "bsrnn/error.hpp"
#include "bsrnn/semisup.hpp"
#include "helpers.hpp"

using namespace bsrnn;

namespace {

constexpr int kRate = 8000;

AudioTrack constant_energy_track(std::size_t n, double energy) {
  auto t = AudioTrack::zeros(1, n, kRate);
  const auto v = static_cast<float>(std::sqrt(energy / static_cast<double>(n)));
  std::fill(t.channels[0].begin(), t.channels[0].end(), v);
  return t;
}

StemPool make_pool() {
  StemPool pool;
  pool.add("vocals", testing::noise_track(1, 2 * kRate, 1, 0.4f, kRate));
  pool.add("bass", testing::noise_track(1, 2 * kRate, 2, 0.4f, kRate));
  pool.add("drums", testing::noise_track(1, 2 * kRate, 3, 0.4f, kRate));
  return pool;
}

FinetuneConfig short_config() {
  FinetuneConfig cfg;
  cfg.mix.chunk_seconds = 0.5;
  return cfg;
}

// "Unlabeled" songs built from known stems plus a separator that knows the
// answer.
struct OracleSet {
  std::vector<AudioTrack> mixtures;
  std::vector<AudioTrack> targets;
};

OracleSet make_oracle(float target_level, float residual_level) {
  OracleSet s;
  auto target = testing::noise_track(1, 2 * kRate, 11, 0.5f, kRate);
  auto residual = testing::noise_track(1, 2 * kRate, 12, 0.5f, kRate);
  target.scale(target_level);
  residual.scale(residual_level);
  AudioTrack mix = target;
  for (std::size_t i = 0; i < mix.length(); ++i) mix.channels[0][i] += residual.channels[0][i];
  s.mixtures.push_back(mix);
  s.targets.push_back(target);
  return s;
}

SeparatorHandle oracle_separator(const OracleSet& set) {
  return [&set](const AudioTrack& chunk) {
    // Find the chunk inside the only song and return the matching target.
    const auto& song = set.mixtures[0];
    for (std::size_t off = 0; off + chunk.length() <= song.length(); ++off) {
      if (song.channels[0][off] == chunk.channels[0][0] &&
          std::equal(chunk.channels[0].begin(), chunk.channels[0].end(), song.channels[0].begin() + long(off))) {
        return set.targets[0].slice(off, chunk.length());
      }
    }
    throw Error(ErrorCode::kInvalidArgument, "chunk not found");
  };
}

}  // namespace

TEST_CASE("energy gap classification") {
  const std::size_t n = 1000;
  const auto mix = constant_energy_track(n, 1.0);
  auto r = classify_separated(mix, constant_energy_track(n, 1e-4), constant_energy_track(n, 0.9));
  CHECK(r.cls == SampleClass::kCleanResidual);
  CHECK(r.target_gap_db == doctest::Approx(40.0).epsilon(1e-6));
  r = classify_separated(mix, constant_energy_track(n, 0.99), constant_energy_track(n, 1e-5));
  CHECK(r.cls == SampleClass::kCleanTarget);
  r = classify_separated(mix, constant_energy_track(n, 0.5), constant_energy_track(n, 0.5));
  CHECK(r.cls == SampleClass::kPseudoPair);
  CHECK(r.target_gap_db == doctest::Approx(3.0103).epsilon(1e-4));
  CHECK_FALSE(r.anomalous);
}

TEST_CASE("threshold is strict and both-silent is anomalous") {
  const std::size_t n = 1000;
  const auto mix = constant_energy_track(n, 1.0);
  const auto r = classify_separated(mix, constant_energy_track(n, 1e-5), constant_energy_track(n, 1e-5));
  CHECK(r.cls == SampleClass::kCleanResidual);
  CHECK(r.anomalous);
  auto zero = AudioTrack::zeros(1, n, kRate);
  CHECK(classify_separated(mix, zero, mix).cls == SampleClass::kCleanResidual);
  CHECK(classify_separated(mix, mix, zero).cls == SampleClass::kCleanTarget);
  // 1e-3 energy ratio is exactly 30 dB, which does not exceed the threshold.
  const auto t = constant_energy_track(n, 1.0);
  auto part = t;
  part.scale(static_cast<float>(std::sqrt(1e-3)));
  const auto edge = classify_separated(t, part, t, 30.0);
  CHECK(edge.target_gap_db == doctest::Approx(30.0).epsilon(1e-5));
  CHECK(classify_separated(t, part, t, 30.0 + 1e-4).cls == SampleClass::kPseudoPair);
}

TEST_CASE("classification is scale invariant") {
  const auto mix = testing::noise_track(2, 4000, 5, 0.5f, kRate);
  auto tgt = mix;
  tgt.scale(0.02f);
  const auto res = subtract(mix, tgt);
  const auto base = classify_separated(mix, tgt, res);
  for (float c : {0.1f, 1.0f, 10.0f}) {
    auto m = mix, t = tgt, r = res;
    m.scale(c);
    t.scale(c);
    r.scale(c);
    CHECK(classify_separated(m, t, r).cls == base.cls);
  }
}

TEST_CASE("silent mixture is degenerate") {
  const auto z = AudioTrack::zeros(1, 100, kRate);
  try {
    classify_separated(z, z, z);
    FAIL("expected degenerate input");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateInput);
  }
  CHECK_THROWS_AS(classify_separated(z, AudioTrack::zeros(1, 99, kRate), z), Error);
}

TEST_CASE("silent target routes the raw mixture to the residual set") {
  const auto oracle = make_oracle(0.0f, 1.0f);
  const auto pool = make_pool();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SeededRandom rng(seed);
    const auto fx = sample_finetune_example(pool, oracle.mixtures, "vocals", oracle_separator(oracle), short_config(), rng);
    REQUIRE(fx.unlabeled.size() == 1);
    CHECK(fx.unlabeled[0].classification.cls == SampleClass::kCleanResidual);
    REQUIRE(fx.residual_candidates.size() == 2);
    CHECK(fx.target_candidates.size() == 1);
    const auto& cand = fx.residual_candidates[1];
    CHECK(cand.origin == "unlabeled-mixture");
    CHECK(cand.sources[0].audio.channels ==
          oracle.mixtures[0].slice(fx.unlabeled[0].offset, cand.sources[0].audio.length()).channels);
  }
}

TEST_CASE("silent residual routes the raw mixture to the target set") {
  const auto oracle = make_oracle(1.0f, 0.0f);
  SeededRandom rng(1);
  const auto fx = sample_finetune_example(make_pool(), oracle.mixtures, "vocals", oracle_separator(oracle), short_config(), rng);
  CHECK(fx.unlabeled[0].classification.cls == SampleClass::kCleanTarget);
  REQUIRE(fx.target_candidates.size() == 2);
  CHECK(fx.target_candidates[1].origin == "unlabeled-mixture");
  CHECK(fx.residual_candidates.size() == 1);
}

TEST_CASE("pseudo pairs carry the separated signals") {
  const auto oracle = make_oracle(1.0f, 1.0f);
  SeededRandom rng(2);
  const auto fx = sample_finetune_example(make_pool(), oracle.mixtures, "vocals", oracle_separator(oracle), short_config(), rng);
  CHECK(fx.unlabeled[0].classification.cls == SampleClass::kPseudoPair);
  REQUIRE(fx.target_candidates.size() == 2);
  REQUIRE(fx.residual_candidates.size() == 2);
  const auto len = fx.target_candidates[1].sources[0].audio.length();
  CHECK(fx.target_candidates[1].sources[0].audio.channels ==
        oracle.targets[0].slice(fx.unlabeled[0].offset, len).channels);
}

TEST_CASE("choosing labeled candidates reproduces the supervised example") {
  const auto oracle = make_oracle(1.0f, 1.0f);
  const auto pool = make_pool();
  const auto cfg = short_config();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    testing::ScriptedRandom rng(seed);
    // Unlabeled song, offset, then the two candidate picks.
    rng.index_ = {0, 100, 0, 0};
    const auto fx = sample_finetune_example(pool, oracle.mixtures, "vocals", oracle_separator(oracle), cfg, rng);
    CHECK(fx.chosen_target == 0);
    CHECK(fx.chosen_residual == 0);
    SeededRandom sub(fx.labeled_seed);
    const auto ex = sample_training_example(pool, "vocals", cfg.mix, sub);
    CHECK(fx.example.mixture.channels == ex.mixture.channels);
    CHECK(fx.example.target.channels == ex.target.channels);
    CHECK(fx.example.gain_db == ex.gain_db);
  }
}

TEST_CASE("silent unlabeled chunks are skipped") {
  std::vector<AudioTrack> unlabeled{AudioTrack::zeros(1, 2 * kRate, kRate)};
  SeededRandom rng(3);
  const SeparatorHandle never = [](const AudioTrack&) -> AudioTrack {
    throw Error(ErrorCode::kInvalidArgument, "separator should not run");
  };
  const auto fx = sample_finetune_example(make_pool(), unlabeled, "vocals", never, short_config(), rng);
  CHECK(fx.unlabeled[0].classification.anomalous);
  CHECK(fx.target_candidates.size() == 1);
  CHECK(fx.residual_candidates.size() == 1);
}

TEST_CASE("teacher replacement needs a strict improvement") {
  CHECK(should_replace_teacher(10.1, 10.0));
  CHECK_FALSE(should_replace_teacher(10.0, 10.0));
  CHECK_FALSE(should_replace_teacher(9.9, 10.0));
}
