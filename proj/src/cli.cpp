#include "bsrnn/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "bsrnn/band_scheme.hpp"
#include "bsrnn/error.hpp"
#include "bsrnn/metrics.hpp"
#include "bsrnn/mixsim.hpp"
#include "bsrnn/model.hpp"
#include "bsrnn/pipeline.hpp"
#include "bsrnn/sad.hpp"
#include "bsrnn/semisup.hpp"
#include "bsrnn/wav.hpp"
#include "bsrnn/weights_io.hpp"

namespace bsrnn {
namespace {

namespace fs = std::filesystem;

std::string fmt_db(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

std::string fmt_signed(double v) {
  std::ostringstream os;
  os << std::showpos << std::fixed << std::setprecision(4) << v;
  return os.str();
}

WavEncoding parse_encoding(const std::string& s) {
  if (s == "float32") return WavEncoding::kFloat32;
  if (s == "pcm16") return WavEncoding::kPcm16;
  if (s == "pcm24") return WavEncoding::kPcm24;
  throw Error(ErrorCode::kInvalidArgument, "unknown encoding '" + s + "'");
}

std::vector<fs::path> sorted_wavs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".wav") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<fs::path> sorted_subdirs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct SchemeArgs {
  std::string name;
  std::string file;
};

void add_scheme_options(CLI::App* cmd, SchemeArgs& args) {
  auto* by_name = cmd->add_option("--scheme", args.name, "Builtin band scheme name");
  auto* by_file = cmd->add_option("--scheme-file", args.file, "Ledger file 'upper_hz:bandwidth_hz,...;tail=...'");
  by_name->excludes(by_file);
}

BandScheme resolve_scheme(const SchemeArgs& args) {
  if (!args.file.empty()) {
    return compile_scheme(BandLedger::parse(read_text(args.file)), kContainerSampleRate, kContainerFft,
                          fs::path(args.file).stem().string());
  }
  return builtin_scheme(args.name.empty() ? "v7" : args.name, kContainerSampleRate, kContainerFft);
}

// Salient segments of every stem file under <dir>/<song>/<stem>.wav.
StemPool load_stem_pool(const fs::path& dir, double segment_seconds, std::ostream& err) {
  StemPool pool;
  SadConfig sad;
  sad.segment_seconds = segment_seconds;
  for (const auto& song : sorted_subdirs(dir)) {
    for (const auto& wav : sorted_wavs(song)) {
      const AudioTrack track = read_wav(wav);
      const SadResult r = detect_salient_segments(track, sad);
      if (r.too_short) {
        err << "warning: " << wav.string() << " is shorter than one segment, skipped\n";
        continue;
      }
      for (const auto& seg : r.segments) pool.add(wav.stem().string(), track.slice(seg.start, seg.length));
    }
  }
  return pool;
}

std::string manifest_sources(const TrainingExample& ex) {
  std::string s;
  for (std::size_t i = 0; i < ex.labels.size(); ++i) {
    if (i) s += ',';
    s += ex.labels[i] + ":" + fmt_signed(ex.gain_db[i]) + ":" + (ex.dropped[i] ? "dropped" : "kept");
  }
  return s;
}

std::string example_id(std::size_t i) {
  std::ostringstream os;
  os << "example_" << std::setw(5) << std::setfill('0') << i;
  return os.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Band-split RNN source separation toolkit", "bsrnn"};
  app.require_subcommand(1);

  // scheme
  auto* scheme_cmd = app.add_subcommand("scheme", "Inspect band-split schemes");
  scheme_cmd->require_subcommand(1);
  auto* scheme_list = scheme_cmd->add_subcommand("list", "List builtin schemes with their band counts");
  auto* scheme_show = scheme_cmd->add_subcommand("show", "Print the bin table of a scheme");
  SchemeArgs show_scheme;
  add_scheme_options(scheme_show, show_scheme);

  // weights
  auto* weights_cmd = app.add_subcommand("weights", "Create and inspect .bsrw weight files");
  weights_cmd->require_subcommand(1);
  auto* weights_init = weights_cmd->add_subcommand("init", "Write randomly initialised weights");
  SchemeArgs init_scheme;
  add_scheme_options(weights_init, init_scheme);
  std::uint64_t init_seed = 0;
  std::string init_out;
  int feature_dim = 128, blocks = 12, hidden = 256;
  weights_init->add_option("--seed", init_seed, "Generator seed")->required();
  weights_init->add_option("--out", init_out, "Output .bsrw path")->required();
  weights_init->add_option("--feature-dim", feature_dim, "Feature dimension N")->capture_default_str();
  weights_init->add_option("--blocks", blocks, "Band/sequence modeling blocks")->capture_default_str();
  weights_init->add_option("--hidden", hidden, "BLSTM hidden units per direction")->capture_default_str();
  auto* weights_info = weights_cmd->add_subcommand("info", "Summarise a weight file");
  std::string info_path;
  weights_info->add_option("--weights", info_path, "Weight file")->required();

  // separate
  auto* sep_cmd = app.add_subcommand("separate", "Separate a full song by chunked overlap-add");
  std::string sep_weights, sep_in, sep_out, sep_encoding = "float32";
  InferenceConfig sep_cfg;
  sep_cmd->add_option("--weights", sep_weights, "Weight file")->required();
  sep_cmd->add_option("--in", sep_in, "Input mixture WAV")->required();
  sep_cmd->add_option("--out", sep_out, "Output target WAV")->required();
  sep_cmd->add_option("--hop", sep_cfg.hop_seconds, "Chunk hop in seconds")->capture_default_str();
  sep_cmd->add_option("--chunk", sep_cfg.chunk_seconds, "Chunk length in seconds")->capture_default_str();
  sep_cmd->add_option("--threads", sep_cfg.threads, "Worker threads")->capture_default_str();
  sep_cmd->add_option("--encoding", sep_encoding, "float32 | pcm16 | pcm24")->capture_default_str();

  // sad
  auto* sad_cmd = app.add_subcommand("sad", "Detect salient segments of a track");
  std::string sad_in, sad_out_dir;
  SadConfig sad_cfg;
  sad_cmd->add_option("--in", sad_in, "Input WAV")->required();
  sad_cmd->add_option("--length", sad_cfg.segment_seconds, "Segment length in seconds")->capture_default_str();
  sad_cmd->add_option("--out-dir", sad_out_dir, "Write each salient segment as a WAV here");

  // mix
  auto* mix_cmd = app.add_subcommand("mix", "Simulate supervised training mixtures");
  std::string mix_stems, mix_target, mix_out_dir;
  std::size_t mix_count = 1;
  std::uint64_t mix_seed = 0;
  double mix_segment = 6.0;
  MixSimConfig mix_cfg;
  mix_cmd->add_option("--stems-dir", mix_stems, "Directory of <song>/<stem>.wav")->required();
  mix_cmd->add_option("--target", mix_target, "Target stem name")->required();
  mix_cmd->add_option("--count", mix_count, "Number of examples")->capture_default_str();
  mix_cmd->add_option("--seed", mix_seed, "Base seed")->capture_default_str();
  mix_cmd->add_option("--out-dir", mix_out_dir, "Output directory")->required();
  mix_cmd->add_option("--segment", mix_segment, "SAD segment length in seconds")->capture_default_str();
  mix_cmd->add_option("--chunk", mix_cfg.chunk_seconds, "Example length in seconds")->capture_default_str();

  // semisample
  auto* semi_cmd = app.add_subcommand("semisample", "Sample semi-supervised finetuning examples");
  std::string semi_labeled, semi_unlabeled, semi_weights, semi_target, semi_out_dir;
  std::size_t semi_count = 1;
  std::uint64_t semi_seed = 0;
  double semi_segment = 6.0;
  FinetuneConfig semi_cfg;
  semi_cmd->add_option("--labeled-dir", semi_labeled, "Directory of <song>/<stem>.wav")->required();
  semi_cmd->add_option("--unlabeled-dir", semi_unlabeled, "Directory of unlabeled mixture WAVs")->required();
  semi_cmd->add_option("--weights", semi_weights, "Separator weight file")->required();
  semi_cmd->add_option("--target", semi_target, "Target stem name")->required();
  semi_cmd->add_option("--threshold-db", semi_cfg.threshold_db, "Energy gap threshold")->capture_default_str();
  semi_cmd->add_option("--count", semi_count, "Number of examples")->capture_default_str();
  semi_cmd->add_option("--seed", semi_seed, "Base seed")->capture_default_str();
  semi_cmd->add_option("--out-dir", semi_out_dir, "Output directory")->required();
  semi_cmd->add_option("--segment", semi_segment, "SAD segment length in seconds")->capture_default_str();
  semi_cmd->add_option("--chunk", semi_cfg.mix.chunk_seconds, "Example length in seconds")->capture_default_str();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score estimates against references");
  std::string eval_ref, eval_est, eval_metric = "usdr";
  eval_cmd->add_option("--ref-dir", eval_ref, "Reference WAV directory")->required();
  eval_cmd->add_option("--est-dir", eval_est, "Estimate WAV directory")->required();
  eval_cmd->add_option("--metric", eval_metric, "usdr | csdr")
      ->check(CLI::IsMember({"usdr", "csdr"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (scheme_list->parsed()) {
      for (const auto& name : builtin_scheme_names()) {
        out << name << '\t' << builtin_scheme(name).num_bands() << '\n';
      }
    } else if (scheme_show->parsed()) {
      const BandScheme s = resolve_scheme(show_scheme);
      out << "# scheme " << s.name << " K=" << s.num_bands() << " ledger=" << s.ledger.to_string() << '\n';
      const double hz_per_bin = static_cast<double>(s.sample_rate) / static_cast<double>(s.n_fft);
      for (std::size_t i = 0; i < s.bands.size(); ++i) {
        const auto& b = s.bands[i];
        out << i << '\t' << b.start << '\t' << b.width << '\t' << fmt_db(b.start * hz_per_bin) << '\t'
            << fmt_db((b.start + b.width - 1) * hz_per_bin) << '\n';
      }
    } else if (weights_init->parsed()) {
      ModelConfig cfg;
      cfg.scheme = resolve_scheme(init_scheme);
      cfg.feature_dim = feature_dim;
      cfg.num_blocks = blocks;
      cfg.lstm_hidden = hidden;
      save_weights(init_weights(cfg, init_seed), cfg, init_out);
      out << "wrote " << init_out << " (" << param_count(cfg) << " parameters)\n";
    } else if (weights_info->parsed()) {
      const auto [w, cfg] = load_weights(info_path);
      out << "scheme\t" << cfg.scheme.name << '\n'
          << "ledger\t" << cfg.scheme.ledger.to_string() << '\n'
          << "bands\t" << cfg.scheme.num_bands() << '\n'
          << "feature_dim\t" << cfg.feature_dim << '\n'
          << "blocks\t" << cfg.num_blocks << '\n'
          << "lstm_hidden\t" << cfg.lstm_hidden << '\n'
          << "tensors\t" << w.size() << '\n'
          << "parameters\t" << param_count(cfg) << '\n';
    } else if (sep_cmd->parsed()) {
      auto [w, cfg] = load_weights(sep_weights);
      const BsrnnModel model(std::move(cfg), std::move(w));
      const AudioTrack mix = read_wav(sep_in);
      write_wav(sep_out, separate_track(model, sep_cfg, mix), parse_encoding(sep_encoding));
    } else if (sad_cmd->parsed()) {
      const AudioTrack track = read_wav(sad_in);
      const SadResult r = detect_salient_segments(track, sad_cfg);
      if (r.too_short) err << "warning: track is shorter than one segment\n";
      if (!sad_out_dir.empty()) fs::create_directories(sad_out_dir);
      for (const auto& seg : r.segments) {
        out << seg.start << '\t' << seg.length << '\n';
        if (!sad_out_dir.empty()) {
          const auto name = fs::path(sad_in).stem().string() + "_" + std::to_string(seg.start) + ".wav";
          write_wav(fs::path(sad_out_dir) / name, track.slice(seg.start, seg.length));
        }
      }
    } else if (mix_cmd->parsed()) {
      const StemPool pool = load_stem_pool(mix_stems, mix_segment, err);
      fs::create_directories(mix_out_dir);
      std::ofstream manifest(fs::path(mix_out_dir) / "manifest.tsv");
      for (std::size_t i = 0; i < mix_count; ++i) {
        const std::uint64_t seed = derive_seed(mix_seed, i);
        SeededRandom rng(seed);
        const TrainingExample ex = sample_training_example(pool, mix_target, mix_cfg, rng);
        const std::string id = example_id(i);
        write_wav(fs::path(mix_out_dir) / (id + "_mixture.wav"), ex.mixture);
        write_wav(fs::path(mix_out_dir) / (id + "_target.wav"), ex.target);
        manifest << id << "\tseed=" << seed << '\t' << manifest_sources(ex) << "\tsilent=" << ex.silent << '\n';
      }
    } else if (semi_cmd->parsed()) {
      const StemPool pool = load_stem_pool(semi_labeled, semi_segment, err);
      std::vector<AudioTrack> unlabeled;
      std::vector<std::string> unlabeled_names;
      for (const auto& p : sorted_wavs(semi_unlabeled)) {
        unlabeled.push_back(read_wav(p));
        unlabeled_names.push_back(p.filename().string());
      }
      auto [w, cfg] = load_weights(semi_weights);
      const BsrnnModel model(std::move(cfg), std::move(w));
      const SeparatorHandle handle = [&model](const AudioTrack& m) { return separate_waveform(model, m); };
      fs::create_directories(semi_out_dir);
      std::ofstream manifest(fs::path(semi_out_dir) / "manifest.tsv");
      for (std::size_t i = 0; i < semi_count; ++i) {
        const std::uint64_t seed = derive_seed(semi_seed, i);
        SeededRandom rng(seed);
        const FinetuneExample fx = sample_finetune_example(pool, unlabeled, semi_target, handle, semi_cfg, rng);
        const std::string id = example_id(i);
        write_wav(fs::path(semi_out_dir) / (id + "_mixture.wav"), fx.example.mixture);
        write_wav(fs::path(semi_out_dir) / (id + "_target.wav"), fx.example.target);
        manifest << id << "\tseed=" << seed;
        for (const auto& d : fx.unlabeled) {
          manifest << "\tunlabeled=" << unlabeled_names[d.source_index] << '@' << d.offset
                   << "\tclass=" << sample_class_name(d.classification.cls)
                   << "\ttarget_gap_db=" << fmt_db(d.classification.target_gap_db)
                   << "\tresidual_gap_db=" << fmt_db(d.classification.residual_gap_db);
        }
        manifest << "\ttarget_from=" << fx.target_candidates[fx.chosen_target].origin
                 << "\tresidual_from=" << fx.residual_candidates[fx.chosen_residual].origin << '\t'
                 << manifest_sources(fx.example) << '\n';
      }
    } else if (eval_cmd->parsed()) {
      std::vector<double> scores;
      out << "song\t" << eval_metric << '\n';
      for (const auto& ref_path : sorted_wavs(eval_ref)) {
        const fs::path est_path = fs::path(eval_est) / ref_path.filename();
        const AudioTrack ref = read_wav(ref_path);
        const AudioTrack est = read_wav(est_path);
        const double v = eval_metric == "usdr" ? usdr(ref, est) : csdr_song(ref, est);
        scores.push_back(v);
        out << ref_path.filename().string() << '\t' << fmt_db(v) << '\n';
      }
      if (scores.empty()) throw Error(ErrorCode::kIo, "no WAV files in " + eval_ref);
      if (eval_metric == "usdr") {
        const CorpusScore c = usdr_mean(scores);
        if (c.excluded) err << "warning: " << c.excluded << " infinite uSDR value(s) excluded from the mean\n";
        out << "corpus\t" << fmt_db(c.value) << '\n';
      } else {
        out << "corpus\t" << fmt_db(csdr_corpus(scores)) << '\n';
      }
    }
  } catch (const Error& e) {
    err << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace bsrnn
