#pragma once

#include <vector>

#include <Eigen/Core>

namespace bsrnn::nn {

using Index = Eigen::Index;
using Vector = Eigen::VectorXf;
using Matrix = Eigen::MatrixXf;
using RowMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMatrixMap = Eigen::Map<const RowMatrix>;
using ConstVectorMap = Eigen::Map<const Vector>;
using RowMatrixRef = Eigen::Ref<const RowMatrix>;
using VectorRef = Eigen::Ref<const Vector>;

inline constexpr float kNormEps = 1e-5f;

// Parameters of one LSTM direction. Gate blocks of w_ih, w_hh and bias are
// stacked in the order [input, forget, cell, output]. The struct only views
// storage owned elsewhere.
struct LstmParams {
  ConstRowMatrixMap w_ih;  // 4H x D
  ConstRowMatrixMap w_hh;  // 4H x H
  ConstVectorMap bias;     // 4H

  LstmParams(const float* w_ih_data, const float* w_hh_data, const float* bias_data, Index input_size,
             Index hidden)
      : w_ih(w_ih_data, 4 * hidden, input_size),
        w_hh(w_hh_data, 4 * hidden, hidden),
        bias(bias_data, 4 * hidden) {}

  LstmParams(const RowMatrix& w_ih_m, const RowMatrix& w_hh_m, const Vector& bias_v)
      : LstmParams(w_ih_m.data(), w_hh_m.data(), bias_v.data(), w_ih_m.cols(), w_hh_m.cols()) {}

  Index hidden() const { return w_hh.cols(); }
  Index input_size() const { return w_ih.cols(); }
  void validate() const;
};

Vector linear(const VectorRef& x, const RowMatrixRef& weight, const VectorRef& bias);

Vector layer_norm(const VectorRef& x, const VectorRef& gamma, const VectorRef& beta, float eps = kNormEps);

// One-group normalisation: statistics over every entry of the N x S instance,
// affine per feature row.
Matrix group_norm_single(const Matrix& x, const VectorRef& gamma, const VectorRef& beta,
                         float eps = kNormEps);

std::vector<Vector> blstm(const std::vector<Vector>& sequence, const LstmParams& forward,
                          const LstmParams& backward);

Vector glu(const VectorRef& x);

// Batched forms used by the model. Inputs hold `batch` independent
// sequences of `steps` columns each, column index = step * batch + b.

// Applies weight * x + bias to every column.
Matrix linear_columns(const Matrix& x, const RowMatrixRef& weight, const VectorRef& bias);

// Layer norm of every column independently, in place.
void layer_norm_columns(Matrix& x, const VectorRef& gamma, const VectorRef& beta, float eps = kNormEps);

// Output is 2H x (steps * batch): forward hidden states stacked over backward.
Matrix blstm_batched(const Matrix& input, Index steps, Index batch, const LstmParams& forward,
                     const LstmParams& backward);

// Halves the rows: first half gated by sigmoid of the second half.
Matrix glu_columns(const Matrix& x);

}  // namespace bsrnn::nn
