#include "bsrnn/model.hpp"

#include <cmath>
#include <random>

#include "bsrnn/error.hpp"

namespace bsrnn {
namespace {

using nn::Index;
using nn::Matrix;

const char* const kPaths[] = {"seq", "band"};

std::string dims_string(const std::vector<std::uint32_t>& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "x" : "") + std::to_string(dims[i]);
  return s + "]";
}

void push_norm(std::vector<TensorSpec>& out, const std::string& prefix, std::uint32_t size) {
  out.push_back({prefix + ".gamma", {size}, TensorRole::kNormGamma, 1});
  out.push_back({prefix + ".beta", {size}, TensorRole::kNormBeta, 1});
}

void push_affine(std::vector<TensorSpec>& out, const std::string& prefix, std::uint32_t rows,
                 std::uint32_t cols) {
  out.push_back({prefix + ".weight", {rows, cols}, TensorRole::kWeight, cols});
  out.push_back({prefix + ".bias", {rows}, TensorRole::kBias, cols});
}

// Complex F x T spectrogram rows [start, start + width) as a 2G x T real
// matrix, real parts stacked over imaginary parts.
Matrix band_features(const Eigen::MatrixXcd& bins, const Band& band) {
  const auto g = static_cast<Index>(band.width);
  const auto start = static_cast<Index>(band.start);
  Matrix out(2 * g, bins.cols());
  out.topRows(g) = bins.middleRows(start, g).real().cast<float>();
  out.bottomRows(g) = bins.middleRows(start, g).imag().cast<float>();
  return out;
}

}  // namespace

void ModelConfig::validate() const {
  if (feature_dim < 1 || num_blocks < 1 || lstm_hidden < 1) {
    throw Error(ErrorCode::kConfig, "feature_dim, num_blocks and lstm_hidden must be >= 1");
  }
  if (scheme.bands.empty()) throw Error(ErrorCode::kConfig, "model config has an empty band scheme");
}

std::size_t Tensor::numel() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<TensorSpec> tensor_layout(const ModelConfig& config) {
  config.validate();
  const auto n = static_cast<std::uint32_t>(config.feature_dim);
  const auto h = static_cast<std::uint32_t>(config.lstm_hidden);
  const auto mlp = static_cast<std::uint32_t>(config.mlp_hidden());
  std::vector<TensorSpec> out;

  for (std::size_t i = 0; i < config.scheme.num_bands(); ++i) {
    const auto g2 = static_cast<std::uint32_t>(2 * config.scheme.bands[i].width);
    const std::string p = "bandsplit." + std::to_string(i);
    push_norm(out, p + ".norm", g2);
    push_affine(out, p + ".fc", n, g2);
  }
  for (int b = 0; b < config.num_blocks; ++b) {
    for (const char* path : kPaths) {
      const std::string p = "block." + std::to_string(b) + "." + path;
      push_norm(out, p + ".norm", n);
      for (const char* dir : {"fw", "bw"}) {
        const std::string l = p + ".blstm." + dir;
        out.push_back({l + ".w_ih", {4 * h, n}, TensorRole::kWeight, n});
        out.push_back({l + ".w_hh", {4 * h, h}, TensorRole::kWeight, h});
        out.push_back({l + ".bias", {4 * h}, TensorRole::kBias, h});
      }
      push_affine(out, p + ".fc", n, 2 * h);
    }
  }
  for (std::size_t i = 0; i < config.scheme.num_bands(); ++i) {
    const auto g4 = static_cast<std::uint32_t>(4 * config.scheme.bands[i].width);
    const std::string p = "mask." + std::to_string(i);
    push_norm(out, p + ".norm", n);
    push_affine(out, p + ".fc1", mlp, n);
    push_affine(out, p + ".fc2", g4, mlp);
  }
  return out;
}

std::uint64_t param_count(const ModelConfig& config) {
  config.validate();
  const std::uint64_t n = static_cast<std::uint64_t>(config.feature_dim);
  const std::uint64_t h = static_cast<std::uint64_t>(config.lstm_hidden);
  const std::uint64_t mlp = 4 * n;
  const std::uint64_t k = config.scheme.num_bands();
  const std::uint64_t f = config.scheme.num_bins();  // sum of G_i

  // Band split: norm 2*2G, fc N*2G + N.
  const std::uint64_t band_split = 4 * f + 2 * n * f + k * n;
  // One residual BLSTM: norm 2N, two directions of 4H(N + H + 1), fc N*2H + N.
  const std::uint64_t rnn = 2 * n + 2 * 4 * h * (n + h + 1) + 2 * h * n + n;
  // Mask MLP: norm 2N, fc1 4N*N + 4N, fc2 4G*4N + 4G.
  const std::uint64_t mask = k * (2 * n + mlp * n + mlp) + 4 * f * mlp + 4 * f;
  return band_split + 2 * static_cast<std::uint64_t>(config.num_blocks) * rnn + mask;
}

const Tensor& ModelWeights::get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw Error(ErrorCode::kMissingTensor, "missing tensor '" + name + "'");
  return it->second;
}

Tensor& ModelWeights::get(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw Error(ErrorCode::kMissingTensor, "missing tensor '" + name + "'");
  return it->second;
}

ModelWeights init_weights(const ModelConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ModelWeights weights;
  for (const auto& spec : tensor_layout(config)) {
    Tensor t{spec.dims, {}};
    t.data.resize(t.numel());
    switch (spec.role) {
      case TensorRole::kNormGamma:
        std::fill(t.data.begin(), t.data.end(), 1.0f);
        break;
      case TensorRole::kNormBeta:
        std::fill(t.data.begin(), t.data.end(), 0.0f);
        break;
      case TensorRole::kWeight:
      case TensorRole::kBias: {
        const float bound = 1.0f / std::sqrt(static_cast<float>(spec.fan_in));
        for (float& v : t.data) {
          // 24 random mantissa bits -> exact float in [0, 1).
          const float u = static_cast<float>(rng() >> 40) * 0x1.0p-24f;
          v = (2.0f * u - 1.0f) * bound;
        }
        break;
      }
    }
    weights.set(spec.name, std::move(t));
  }
  return weights;
}

void validate_weights(const ModelWeights& weights, const ModelConfig& config) {
  const auto layout = tensor_layout(config);
  std::map<std::string, const TensorSpec*> expected;
  for (const auto& spec : layout) expected[spec.name] = &spec;
  for (const auto& spec : layout) {
    if (!weights.contains(spec.name)) {
      throw Error(ErrorCode::kMissingTensor, "missing tensor '" + spec.name + "'");
    }
  }
  for (const auto& [name, tensor] : weights.tensors()) {
    auto it = expected.find(name);
    if (it == expected.end()) throw Error(ErrorCode::kExtraTensor, "unexpected tensor '" + name + "'");
    if (tensor.dims != it->second->dims || tensor.data.size() != tensor.numel()) {
      throw Error(ErrorCode::kTensorShape, "tensor '" + name + "' has shape " + dims_string(tensor.dims) +
                                               ", config expects " + dims_string(it->second->dims));
    }
    for (float v : tensor.data) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNumericDegeneracy, "tensor '" + name + "' contains a non-finite value");
      }
    }
  }
}

Eigen::MatrixXcd apply_mask(const Eigen::MatrixXcd& mask, const Eigen::MatrixXcd& mixture) {
  if (mask.rows() != mixture.rows() || mask.cols() != mixture.cols()) {
    throw Error(ErrorCode::kShape, "mask and mixture shapes differ");
  }
  return mask.cwiseProduct(mixture);
}

BsrnnModel::NormView BsrnnModel::norm_view(const std::string& prefix) const {
  return {weights_.get(prefix + ".gamma").data.data(), weights_.get(prefix + ".beta").data.data()};
}

BsrnnModel::AffineView BsrnnModel::affine_view(const std::string& prefix, Index out, Index in) const {
  return {weights_.get(prefix + ".weight").data.data(), weights_.get(prefix + ".bias").data.data(), out, in};
}

BsrnnModel::BsrnnModel(ModelConfig config, ModelWeights weights)
    : config_(std::move(config)), weights_(std::move(weights)) {
  validate_weights(weights_, config_);
  const Index n = config_.feature_dim;
  const Index h = config_.lstm_hidden;
  const Index mlp = config_.mlp_hidden();

  for (std::size_t i = 0; i < config_.scheme.num_bands(); ++i) {
    const auto g = static_cast<Index>(config_.scheme.bands[i].width);
    const std::string p = "bandsplit." + std::to_string(i);
    band_split_.push_back({norm_view(p + ".norm"), affine_view(p + ".fc", n, 2 * g)});
    const std::string m = "mask." + std::to_string(i);
    mask_.push_back({norm_view(m + ".norm"), affine_view(m + ".fc1", mlp, n),
                     affine_view(m + ".fc2", 4 * g, mlp)});
  }
  for (int b = 0; b < config_.num_blocks; ++b) {
    for (int path = 0; path < 2; ++path) {
      const std::string p = "block." + std::to_string(b) + "." + kPaths[path];
      auto lstm = [&](const char* dir) {
        const std::string l = p + ".blstm." + dir;
        return nn::LstmParams(weights_.get(l + ".w_ih").data.data(), weights_.get(l + ".w_hh").data.data(),
                              weights_.get(l + ".bias").data.data(), n, h);
      };
      RnnView view{norm_view(p + ".norm"), lstm("fw"), lstm("bw"), affine_view(p + ".fc", n, 2 * h)};
      (path == 0 ? seq_rnn_ : band_rnn_).push_back(view);
    }
  }
}

void BsrnnModel::check_input(const ComplexSpectrogram& mixture) const {
  if (static_cast<std::size_t>(mixture.num_bins()) != config_.scheme.num_bins() ||
      mixture.n_fft != config_.scheme.n_fft) {
    throw Error(ErrorCode::kShape, "mixture spectrogram has " + std::to_string(mixture.num_bins()) +
                                       " bins; scheme '" + config_.scheme.name + "' expects " +
                                       std::to_string(config_.scheme.num_bins()));
  }
  if (mixture.num_frames() < 1) throw Error(ErrorCode::kShape, "mixture spectrogram has no frames");
}

FeatureTensor BsrnnModel::band_split(const ComplexSpectrogram& mixture) const {
  check_input(mixture);
  const Index n = config_.feature_dim;
  const auto k = static_cast<Index>(config_.scheme.num_bands());
  const Index t = mixture.num_frames();
  FeatureTensor z{n, k, t, Matrix(n, t * k)};
  for (Index i = 0; i < k; ++i) {
    const auto& band = config_.scheme.bands[static_cast<std::size_t>(i)];
    const auto& view = band_split_[static_cast<std::size_t>(i)];
    const Index g2 = 2 * static_cast<Index>(band.width);
    Matrix x = band_features(mixture.bins, band);
    nn::layer_norm_columns(x, nn::ConstVectorMap(view.norm.gamma, g2), nn::ConstVectorMap(view.norm.beta, g2));
    const Matrix y = nn::linear_columns(x, nn::ConstRowMatrixMap(view.fc.weight, n, g2),
                                        nn::ConstVectorMap(view.fc.bias, n));
    for (Index f = 0; f < t; ++f) z.data.col(f * k + i) = y.col(f);
  }
  return z;
}

void BsrnnModel::residual_rnn(FeatureTensor& z, const RnnView& rnn, bool across_bands) const {
  const Index n = z.features;
  const Index k = z.bands;
  const Index t = z.frames;
  const nn::ConstVectorMap gamma(rnn.norm.gamma, n);
  const nn::ConstVectorMap beta(rnn.norm.beta, n);

  // Normalised input laid out step-major for the batched BLSTM.
  Matrix normed(n, t * k);
  if (!across_bands) {
    // One instance per band over all frames; steps = frames, batch = bands,
    // which is the native column order.
    Matrix inst(n, t);
    for (Index b = 0; b < k; ++b) {
      for (Index f = 0; f < t; ++f) inst.col(f) = z.data.col(f * k + b);
      const Matrix y = nn::group_norm_single(inst, gamma, beta);
      for (Index f = 0; f < t; ++f) normed.col(f * k + b) = y.col(f);
    }
  } else {
    // One instance per frame over all bands; steps = bands, batch = frames.
    for (Index f = 0; f < t; ++f) {
      const Matrix y = nn::group_norm_single(z.data.middleCols(f * k, k), gamma, beta);
      for (Index b = 0; b < k; ++b) normed.col(b * t + f) = y.col(b);
    }
  }

  const Matrix hidden = across_bands ? nn::blstm_batched(normed, k, t, rnn.fw, rnn.bw)
                                     : nn::blstm_batched(normed, t, k, rnn.fw, rnn.bw);
  const Matrix out = nn::linear_columns(hidden, nn::ConstRowMatrixMap(rnn.fc.weight, rnn.fc.out, rnn.fc.in),
                                        nn::ConstVectorMap(rnn.fc.bias, rnn.fc.out));
  if (!across_bands) {
    z.data += out;
  } else {
    for (Index b = 0; b < k; ++b) {
      for (Index f = 0; f < t; ++f) z.data.col(f * k + b) += out.col(b * t + f);
    }
  }
}

void BsrnnModel::apply_block(FeatureTensor& z, int block) const {
  if (block < 0 || block >= config_.num_blocks) {
    throw Error(ErrorCode::kInvalidArgument, "block index out of range");
  }
  if (z.features != config_.feature_dim || z.bands != static_cast<Index>(config_.scheme.num_bands())) {
    throw Error(ErrorCode::kShape, "feature tensor does not match the model config");
  }
  residual_rnn(z, seq_rnn_[static_cast<std::size_t>(block)], false);
  residual_rnn(z, band_rnn_[static_cast<std::size_t>(block)], true);
}

FeatureTensor BsrnnModel::band_sequence(FeatureTensor z) const {
  for (int b = 0; b < config_.num_blocks; ++b) apply_block(z, b);
  return z;
}

Eigen::MatrixXcd BsrnnModel::mask(const FeatureTensor& q) const {
  const Index n = config_.feature_dim;
  const Index mlp = config_.mlp_hidden();
  const auto k = static_cast<Index>(config_.scheme.num_bands());
  if (q.features != n || q.bands != k) throw Error(ErrorCode::kShape, "feature tensor does not match the model config");
  const Index t = q.frames;
  Eigen::MatrixXcd m(static_cast<Index>(config_.scheme.num_bins()), t);
  Matrix x(n, t);
  for (Index i = 0; i < k; ++i) {
    const auto& band = config_.scheme.bands[static_cast<std::size_t>(i)];
    const auto& view = mask_[static_cast<std::size_t>(i)];
    const auto g = static_cast<Index>(band.width);
    for (Index f = 0; f < t; ++f) x.col(f) = q.data.col(f * k + i);
    nn::layer_norm_columns(x, nn::ConstVectorMap(view.norm.gamma, n), nn::ConstVectorMap(view.norm.beta, n));
    Matrix hidden = nn::linear_columns(x, nn::ConstRowMatrixMap(view.fc1.weight, mlp, n),
                                       nn::ConstVectorMap(view.fc1.bias, mlp));
    hidden = hidden.array().tanh().matrix();
    const Matrix gated = nn::glu_columns(nn::linear_columns(
        hidden, nn::ConstRowMatrixMap(view.fc2.weight, 4 * g, mlp), nn::ConstVectorMap(view.fc2.bias, 4 * g)));
    const auto start = static_cast<Index>(band.start);
    m.middleRows(start, g).real() = gated.topRows(g).cast<double>();
    m.middleRows(start, g).imag() = gated.bottomRows(g).cast<double>();
  }
  return m;
}

Eigen::MatrixXcd BsrnnModel::estimate_mask(const ComplexSpectrogram& mixture) const {
  return mask(band_sequence(band_split(mixture)));
}

ComplexSpectrogram BsrnnModel::separate(const ComplexSpectrogram& mixture) const {
  ComplexSpectrogram out = mixture;
  out.bins = apply_mask(estimate_mask(mixture), mixture.bins);
  return out;
}

}  // namespace bsrnn
