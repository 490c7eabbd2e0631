#include "bsrnn/nn.hpp"

#include <cmath>

#include "bsrnn/error.hpp"

namespace bsrnn::nn {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kShape, what);
}

void lstm_direction(const Matrix& input, Index steps, Index batch, const LstmParams& p, bool reverse,
                    Matrix& out, Index row_offset) {
  const Index hidden = p.hidden();
  Matrix pre;
  pre.noalias() = p.w_ih * input;
  pre.colwise() += p.bias;

  Matrix h = Matrix::Zero(hidden, batch);
  Matrix c = Matrix::Zero(hidden, batch);
  Matrix gates(4 * hidden, batch);
  for (Index i = 0; i < steps; ++i) {
    const Index s = reverse ? steps - 1 - i : i;
    if (i == 0) {
      gates = pre.middleCols(s * batch, batch);
    } else {
      gates.noalias() = p.w_hh * h;
      gates += pre.middleCols(s * batch, batch);
    }
    const auto in_gate = gates.topRows(hidden).array().logistic();
    const auto forget_gate = gates.middleRows(hidden, hidden).array().logistic();
    const auto cell_gate = gates.middleRows(2 * hidden, hidden).array().tanh();
    const auto out_gate = gates.bottomRows(hidden).array().logistic();
    c.array() = forget_gate * c.array() + in_gate * cell_gate;
    h.array() = out_gate * c.array().tanh();
    out.block(row_offset, s * batch, hidden, batch) = h;
  }
}

}  // namespace

void LstmParams::validate() const {
  const Index h = hidden();
  require(w_ih.rows() == 4 * h, "lstm w_ih must have 4H rows");
  require(w_hh.rows() == 4 * h && w_hh.cols() == h, "lstm w_hh must be 4H x H");
  require(bias.size() == 4 * h, "lstm bias must have 4H entries");
}

Vector linear(const VectorRef& x, const RowMatrixRef& weight, const VectorRef& bias) {
  require(weight.cols() == x.size(), "linear: weight columns do not match input size");
  require(weight.rows() == bias.size(), "linear: weight rows do not match bias size");
  Vector y = bias;
  y.noalias() += weight * x;
  return y;
}

Vector layer_norm(const VectorRef& x, const VectorRef& gamma, const VectorRef& beta, float eps) {
  require(x.size() >= 1, "layer_norm: empty input");
  require(gamma.size() == x.size() && beta.size() == x.size(), "layer_norm: affine size mismatch");
  Matrix col = x;
  layer_norm_columns(col, gamma, beta, eps);
  return col.col(0);
}

Matrix group_norm_single(const Matrix& x, const VectorRef& gamma, const VectorRef& beta, float eps) {
  require(x.size() >= 1, "group_norm: empty input");
  require(gamma.size() == x.rows() && beta.size() == x.rows(), "group_norm: affine size mismatch");
  const double count = static_cast<double>(x.size());
  double sum = 0.0;
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) sum += x(i, j);
  }
  const double mean = sum / count;
  double sq = 0.0;
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      const double d = x(i, j) - mean;
      sq += d * d;
    }
  }
  const auto inv_std = static_cast<float>(1.0 / std::sqrt(sq / count + eps));
  const auto m = static_cast<float>(mean);
  Matrix y = ((x.array() - m) * inv_std).matrix();
  y.array().colwise() *= gamma.array();
  y.colwise() += beta;
  return y;
}

std::vector<Vector> blstm(const std::vector<Vector>& sequence, const LstmParams& forward,
                          const LstmParams& backward) {
  require(!sequence.empty(), "blstm: empty sequence");
  const Index d = sequence.front().size();
  Matrix input(d, static_cast<Index>(sequence.size()));
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    require(sequence[t].size() == d, "blstm: ragged input sequence");
    input.col(static_cast<Index>(t)) = sequence[t];
  }
  const Matrix out = blstm_batched(input, input.cols(), 1, forward, backward);
  std::vector<Vector> result;
  result.reserve(sequence.size());
  for (Index t = 0; t < out.cols(); ++t) result.emplace_back(out.col(t));
  return result;
}

Vector glu(const VectorRef& x) {
  if (x.size() % 2 != 0) throw Error(ErrorCode::kShape, "glu: input length must be even");
  Matrix col = x;
  return glu_columns(col).col(0);
}

Matrix linear_columns(const Matrix& x, const RowMatrixRef& weight, const VectorRef& bias) {
  require(weight.cols() == x.rows(), "linear: weight columns do not match input rows");
  require(weight.rows() == bias.size(), "linear: weight rows do not match bias size");
  Matrix y;
  y.noalias() = weight * x;
  y.colwise() += bias;
  return y;
}

void layer_norm_columns(Matrix& x, const VectorRef& gamma, const VectorRef& beta, float eps) {
  require(gamma.size() == x.rows() && beta.size() == x.rows(), "layer_norm: affine size mismatch");
  const Index d = x.rows();
  for (Index j = 0; j < x.cols(); ++j) {
    double sum = 0.0;
    for (Index i = 0; i < d; ++i) sum += x(i, j);
    const double mean = sum / static_cast<double>(d);
    double sq = 0.0;
    for (Index i = 0; i < d; ++i) {
      const double v = x(i, j) - mean;
      sq += v * v;
    }
    const auto inv_std = static_cast<float>(1.0 / std::sqrt(sq / static_cast<double>(d) + eps));
    const auto m = static_cast<float>(mean);
    for (Index i = 0; i < d; ++i) x(i, j) = (x(i, j) - m) * inv_std * gamma(i) + beta(i);
  }
}

Matrix blstm_batched(const Matrix& input, Index steps, Index batch, const LstmParams& forward,
                     const LstmParams& backward) {
  forward.validate();
  backward.validate();
  require(steps >= 1 && batch >= 1 && input.cols() == steps * batch, "blstm: input columns != steps * batch");
  require(forward.input_size() == input.rows() && backward.input_size() == input.rows(),
          "blstm: input size does not match w_ih");
  require(forward.hidden() == backward.hidden(), "blstm: directions differ in hidden size");
  const Index hidden = forward.hidden();
  Matrix out(2 * hidden, input.cols());
  lstm_direction(input, steps, batch, forward, false, out, 0);
  lstm_direction(input, steps, batch, backward, true, out, hidden);
  return out;
}

Matrix glu_columns(const Matrix& x) {
  if (x.rows() % 2 != 0) throw Error(ErrorCode::kShape, "glu: input length must be even");
  const Index half = x.rows() / 2;
  return (x.topRows(half).array() * x.bottomRows(half).array().logistic()).matrix();
}

}  // namespace bsrnn::nn
