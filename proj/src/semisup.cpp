#include "bsrnn/semisup.hpp"

#include <cmath>
#include <limits>

#include "bsrnn/error.hpp"

namespace bsrnn {
namespace {

double gap_db(double mixture_energy, double part_energy) {
  if (part_energy == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(mixture_energy / part_energy);
}

}  // namespace

const char* sample_class_name(SampleClass c) {
  switch (c) {
    case SampleClass::kCleanResidual: return "clean-residual";
    case SampleClass::kCleanTarget: return "clean-target";
    case SampleClass::kPseudoPair: return "pseudo-pair";
  }
  return "unknown";
}

AudioTrack subtract(const AudioTrack& a, const AudioTrack& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::kShape, "cannot subtract tracks of different shape");
  AudioTrack out = a;
  for (std::size_t c = 0; c < a.num_channels(); ++c) {
    for (std::size_t i = 0; i < a.length(); ++i) out.channels[c][i] -= b.channels[c][i];
  }
  return out;
}

Classification classify_separated(const AudioTrack& mixture, const AudioTrack& sep_target,
                                  const AudioTrack& sep_residual, double threshold_db) {
  if (!mixture.same_shape(sep_target) || !mixture.same_shape(sep_residual)) {
    throw Error(ErrorCode::kShape, "mixture and separator outputs differ in shape");
  }
  const double e_mix = mixture.energy();
  if (e_mix == 0.0) throw Error(ErrorCode::kDegenerateInput, "mixture has zero energy");

  Classification out;
  out.target_gap_db = gap_db(e_mix, sep_target.energy());
  out.residual_gap_db = gap_db(e_mix, sep_residual.energy());
  const bool target_silent = out.target_gap_db > threshold_db;
  const bool residual_silent = out.residual_gap_db > threshold_db;
  out.anomalous = target_silent && residual_silent;
  if (target_silent) {
    out.cls = SampleClass::kCleanResidual;
  } else if (residual_silent) {
    out.cls = SampleClass::kCleanTarget;
  } else {
    out.cls = SampleClass::kPseudoPair;
  }
  return out;
}

FinetuneExample sample_finetune_example(const StemPool& labeled, const std::vector<AudioTrack>& unlabeled,
                                        const std::string& target_stem, const SeparatorHandle& separator,
                                        const FinetuneConfig& cfg, RandomSource& rng) {
  labeled.validate();
  if (unlabeled.empty()) throw Error(ErrorCode::kConfig, "unlabeled pool is empty");
  if (!separator) throw Error(ErrorCode::kConfig, "no separator supplied");

  FinetuneExample out;
  out.labeled_seed = rng.next_u64();
  SeededRandom labeled_rng(out.labeled_seed);

  const int sr = labeled.segments(labeled.stems().front()).front().sample_rate;
  const std::size_t len = chunk_samples(cfg.mix.chunk_seconds, sr);
  auto stems = draw_stem_chunks(labeled, target_stem, len, labeled_rng);

  Candidate labeled_target{"labeled", {stems.front()}};
  Candidate labeled_residual{"labeled", {stems.begin() + 1, stems.end()}};
  out.target_candidates.push_back(std::move(labeled_target));
  out.residual_candidates.push_back(std::move(labeled_residual));

  for (std::size_t d = 0; d < cfg.unlabeled_draws; ++d) {
    UnlabeledDraw draw;
    draw.source_index = rng.index(unlabeled.size());
    const AudioTrack& song = unlabeled[draw.source_index];
    if (song.sample_rate != sr) throw Error(ErrorCode::kConfig, "unlabeled audio sample rate differs from labeled");
    if (song.length() < len) throw Error(ErrorCode::kConfig, "unlabeled track shorter than the chunk length");
    draw.offset = rng.index(song.length() - len + 1);
    AudioTrack mixture = song.slice(draw.offset, len);
    if (mixture.energy() == 0.0) {
      // Nothing to route; a silent chunk carries no label information.
      draw.classification.cls = SampleClass::kPseudoPair;
      draw.classification.anomalous = true;
      out.unlabeled.push_back(draw);
      continue;
    }
    AudioTrack sep_target = separator(mixture);
    if (!sep_target.same_shape(mixture)) throw Error(ErrorCode::kShape, "separator changed the signal length");
    AudioTrack sep_residual = subtract(mixture, sep_target);
    draw.classification = classify_separated(mixture, sep_target, sep_residual, cfg.threshold_db);
    switch (draw.classification.cls) {
      case SampleClass::kCleanTarget:
        out.target_candidates.push_back({"unlabeled-mixture", {{"unlabeled", mixture, true}}});
        break;
      case SampleClass::kCleanResidual:
        out.residual_candidates.push_back({"unlabeled-mixture", {{"unlabeled", mixture, false}}});
        break;
      case SampleClass::kPseudoPair:
        out.target_candidates.push_back({"pseudo", {{"pseudo-target", std::move(sep_target), true}}});
        out.residual_candidates.push_back({"pseudo", {{"pseudo-residual", std::move(sep_residual), false}}});
        break;
    }
    out.unlabeled.push_back(draw);
  }

  out.chosen_target = rng.index(out.target_candidates.size());
  out.chosen_residual = rng.index(out.residual_candidates.size());
  std::vector<SourceChunk> sources = out.target_candidates[out.chosen_target].sources;
  const auto& res = out.residual_candidates[out.chosen_residual].sources;
  sources.insert(sources.end(), res.begin(), res.end());
  out.example = augment_and_mix(sources, cfg.mix, labeled_rng);
  return out;
}

bool should_replace_teacher(double val_new_db, double val_best_db) { return val_new_db > val_best_db; }

}  // namespace bsrnn
