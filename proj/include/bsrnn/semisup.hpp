#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bsrnn/audio.hpp"
#include "bsrnn/mixsim.hpp"
#include "bsrnn/random.hpp"

namespace bsrnn {

enum class SampleClass {
  kCleanResidual,  // separated target is negligible: the mixture is pure residual
  kCleanTarget,    // separated residual is negligible: the mixture is pure target
  kPseudoPair,     // both separator outputs are kept as pseudo labels
};

const char* sample_class_name(SampleClass c);

struct Classification {
  SampleClass cls = SampleClass::kPseudoPair;
  double target_gap_db = 0.0;    // 10 log10(E_mix / E_sep_target)
  double residual_gap_db = 0.0;  // 10 log10(E_mix / E_sep_residual)
  bool anomalous = false;        // both gaps above threshold
};

Classification classify_separated(const AudioTrack& mixture, const AudioTrack& sep_target,
                                  const AudioTrack& sep_residual, double threshold_db = 30.0);

// Returns the separated target for a mixture; the residual is mixture minus
// that output.
using SeparatorHandle = std::function<AudioTrack(const AudioTrack&)>;

AudioTrack subtract(const AudioTrack& a, const AudioTrack& b);

struct FinetuneConfig {
  MixSimConfig mix;
  double threshold_db = 30.0;
  std::size_t unlabeled_draws = 1;
};

// A candidate target or residual: one or more sources that are augmented
// independently and summed.
struct Candidate {
  std::string origin;  // "labeled", "unlabeled-mixture", "pseudo"
  std::vector<SourceChunk> sources;
};

struct UnlabeledDraw {
  std::size_t source_index = 0;
  std::size_t offset = 0;
  Classification classification;
};

struct FinetuneExample {
  TrainingExample example;
  std::vector<UnlabeledDraw> unlabeled;
  std::vector<Candidate> target_candidates;
  std::vector<Candidate> residual_candidates;
  std::size_t chosen_target = 0;
  std::size_t chosen_residual = 0;
  std::uint64_t labeled_seed = 0;
};

// One finetuning example. The labeled pair (index 0 of each candidate set)
// and the augmentation use a sub-generator seeded from `rng`, so choosing
// both labeled candidates reproduces sample_training_example() with
// SeededRandom(labeled_seed).
FinetuneExample sample_finetune_example(const StemPool& labeled, const std::vector<AudioTrack>& unlabeled,
                                        const std::string& target_stem, const SeparatorHandle& separator,
                                        const FinetuneConfig& cfg, RandomSource& rng);

// Teacher replacement: the student becomes the pseudo-label generator only
// when it is strictly better on validation.
bool should_replace_teacher(double val_new_db, double val_best_db);

}  // namespace bsrnn
