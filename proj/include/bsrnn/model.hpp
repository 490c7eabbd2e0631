#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bsrnn/band_scheme.hpp"
#include "bsrnn/nn.hpp"
#include "bsrnn/separator.hpp"
#include "bsrnn/stft.hpp"

namespace bsrnn {

struct ModelConfig {
  BandScheme scheme;
  int feature_dim = 128;  // N
  int num_blocks = 12;    // each block holds one sequence and one band residual BLSTM
  int lstm_hidden = 256;  // H, per direction

  int mlp_hidden() const { return 4 * feature_dim; }
  void validate() const;
};

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t numel() const;
  bool operator==(const Tensor&) const = default;
};

enum class TensorRole { kWeight, kBias, kNormGamma, kNormBeta };

struct TensorSpec {
  std::string name;
  std::vector<std::uint32_t> dims;
  TensorRole role;
  std::uint32_t fan_in;  // input width of the map the tensor belongs to
};

// Every parameter of the configured network in canonical order.
std::vector<TensorSpec> tensor_layout(const ModelConfig& config);

std::uint64_t param_count(const ModelConfig& config);

class ModelWeights {
 public:
  using Map = std::map<std::string, Tensor>;

  const Tensor& get(const std::string& name) const;
  Tensor& get(const std::string& name);
  void set(const std::string& name, Tensor tensor) { tensors_[name] = std::move(tensor); }
  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
  void erase(const std::string& name) { tensors_.erase(name); }
  std::size_t size() const { return tensors_.size(); }
  const Map& tensors() const { return tensors_; }

  bool operator==(const ModelWeights&) const = default;

 private:
  Map tensors_;
};

// Uniform in +-1/sqrt(fan_in); norm gammas are one and betas zero.
ModelWeights init_weights(const ModelConfig& config, std::uint64_t seed);

// Throws kMissingTensor / kExtraTensor / kTensorShape / kNumericDegeneracy.
void validate_weights(const ModelWeights& weights, const ModelConfig& config);

// N x K x T real features, stored N x (T * K) with column t * K + k.
struct FeatureTensor {
  nn::Index features = 0;
  nn::Index bands = 0;
  nn::Index frames = 0;
  nn::Matrix data;

  float operator()(nn::Index n, nn::Index k, nn::Index t) const { return data(n, t * bands + k); }
  float& operator()(nn::Index n, nn::Index k, nn::Index t) { return data(n, t * bands + k); }
};

class BsrnnModel final : public SpectrogramSeparator {
 public:
  BsrnnModel(ModelConfig config, ModelWeights weights);
  BsrnnModel(const BsrnnModel&) = delete;
  BsrnnModel& operator=(const BsrnnModel&) = delete;
  BsrnnModel(BsrnnModel&&) = default;

  const ModelConfig& config() const { return config_; }
  const ModelWeights& weights() const { return weights_; }

  FeatureTensor band_split(const ComplexSpectrogram& mixture) const;
  void apply_block(FeatureTensor& z, int block) const;
  FeatureTensor band_sequence(FeatureTensor z) const;
  Eigen::MatrixXcd mask(const FeatureTensor& q) const;
  Eigen::MatrixXcd estimate_mask(const ComplexSpectrogram& mixture) const;

  ComplexSpectrogram separate(const ComplexSpectrogram& mixture) const override;
  StftConfig stft_config() const override { return {config_.scheme.n_fft, 512}; }
  int sample_rate() const override { return config_.scheme.sample_rate; }

 private:
  struct NormView {
    const float* gamma;
    const float* beta;
  };
  struct AffineView {
    const float* weight;
    const float* bias;
    nn::Index out;
    nn::Index in;
  };
  struct RnnView {
    NormView norm;
    nn::LstmParams fw;
    nn::LstmParams bw;
    AffineView fc;
  };
  struct BandSplitView {
    NormView norm;
    AffineView fc;
  };
  struct MaskView {
    NormView norm;
    AffineView fc1;
    AffineView fc2;
  };

  NormView norm_view(const std::string& prefix) const;
  AffineView affine_view(const std::string& prefix, nn::Index out, nn::Index in) const;
  void residual_rnn(FeatureTensor& z, const RnnView& rnn, bool across_bands) const;
  void check_input(const ComplexSpectrogram& mixture) const;

  ModelConfig config_;
  ModelWeights weights_;
  std::vector<BandSplitView> band_split_;
  std::vector<RnnView> seq_rnn_;
  std::vector<RnnView> band_rnn_;
  std::vector<MaskView> mask_;
};

}  // namespace bsrnn
