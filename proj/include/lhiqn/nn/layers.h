// Copyright 2026 The LH-IQN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LHIQN_NN_LAYERS_H_
#define LHIQN_NN_LAYERS_H_

#include <memory>
#include <string>
#include <vector>

#include "lhiqn/nn/num_array.h"
#include "lhiqn/rng.h"

namespace lhiqn::nn {

// Weight initialisation. kFanInUniform draws U(-s, s) with s = scale/sqrt(fan_in)
// for dense, conv and embedding weights and biases; LSTM parameters use
// s = scale/sqrt(cells).
struct InitPolicy {
  double scale = 1.0;
};

// Explicit forward/backward layer. Inputs are batched along the leading
// dimension. Recurrent layers additionally receive the number of time steps;
// their input rows are time-major (row = step * batch + b).
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual NumArray<T> Forward(const NumArray<T>& input, int steps) = 0;
  // Accumulates parameter gradients and returns the input gradient. Requires
  // a preceding Forward.
  virtual NumArray<T> Backward(const NumArray<T>& grad_output) = 0;

  virtual std::vector<Param<T>*> Params() { return {}; }
  virtual void Init(Rng& rng, const InitPolicy& policy) {}

  // Per-row shapes.
  virtual std::vector<int> InputShape() const = 0;
  virtual std::vector<int> OutputShape() const = 0;
  virtual std::string Name() const = 0;
};

// y = W x + b with W of shape (out, in).
template <typename T>
class Dense : public Layer<T> {
 public:
  Dense(int in, int out);

  NumArray<T> Forward(const NumArray<T>& input, int steps) override;
  NumArray<T> Backward(const NumArray<T>& grad_output) override;
  std::vector<Param<T>*> Params() override { return {&weight_, &bias_}; }
  void Init(Rng& rng, const InitPolicy& policy) override;
  std::vector<int> InputShape() const override { return {in_}; }
  std::vector<int> OutputShape() const override { return {out_}; }
  std::string Name() const override { return "dense"; }

  Param<T>& weight() { return weight_; }
  Param<T>& bias() { return bias_; }

 private:
  int in_;
  int out_;
  Param<T> weight_;
  Param<T> bias_;
  NumArray<T> input_;
};

template <typename T>
class Relu : public Layer<T> {
 public:
  explicit Relu(std::vector<int> shape) : shape_(std::move(shape)) {}

  NumArray<T> Forward(const NumArray<T>& input, int steps) override;
  NumArray<T> Backward(const NumArray<T>& grad_output) override;
  std::vector<int> InputShape() const override { return shape_; }
  std::vector<int> OutputShape() const override { return shape_; }
  std::string Name() const override { return "relu"; }

 private:
  std::vector<int> shape_;
  NumArray<T> output_;
};

// Valid 2-D cross-correlation over (channels, height, width) rows.
// Kernels have shape (kernels, channels, size, size).
template <typename T>
class Conv2d : public Layer<T> {
 public:
  Conv2d(int channels, int height, int width, int kernels, int kernel_size,
         int stride);

  NumArray<T> Forward(const NumArray<T>& input, int steps) override;
  NumArray<T> Backward(const NumArray<T>& grad_output) override;
  std::vector<Param<T>*> Params() override { return {&weight_, &bias_}; }
  void Init(Rng& rng, const InitPolicy& policy) override;
  std::vector<int> InputShape() const override {
    return {channels_, height_, width_};
  }
  std::vector<int> OutputShape() const override {
    return {kernels_, out_height_, out_width_};
  }
  std::string Name() const override { return "conv2d"; }

  Param<T>& weight() { return weight_; }
  Param<T>& bias() { return bias_; }

 private:
  void Im2Col(const T* image, T* cols) const;
  void Col2Im(const T* cols, T* image) const;

  int channels_, height_, width_;
  int kernels_, kernel_size_, stride_;
  int out_height_, out_width_;
  Param<T> weight_;
  Param<T> bias_;
  NumArray<T> cols_;  // (batch * patch, positions)
};

// Hidden and cell state of one LSTM layer for a batch.
template <typename T>
struct LstmState {
  NumArray<T> hidden;  // (batch, cells)
  NumArray<T> cell;    // (batch, cells)
};

// Standard LSTM cell with gate order (input, forget, candidate, output).
// Forward unrolls `steps` time steps; Backward is full backpropagation
// through those steps. The state starts at zero unless set_initial_state()
// was called for the next Forward.
template <typename T>
class Lstm : public Layer<T> {
 public:
  Lstm(int in, int cells);

  NumArray<T> Forward(const NumArray<T>& input, int steps) override;
  NumArray<T> Backward(const NumArray<T>& grad_output) override;
  std::vector<Param<T>*> Params() override {
    return {&w_input_, &w_hidden_, &bias_};
  }
  void Init(Rng& rng, const InitPolicy& policy) override;
  std::vector<int> InputShape() const override { return {in_}; }
  std::vector<int> OutputShape() const override { return {cells_}; }
  std::string Name() const override { return "lstm"; }

  // Consumed by the next Forward.
  void set_initial_state(const LstmState<T>& state) {
    initial_ = state;
    has_initial_ = true;
  }
  const LstmState<T>& final_state() const { return final_; }

  Param<T>& w_input() { return w_input_; }
  Param<T>& w_hidden() { return w_hidden_; }
  Param<T>& bias() { return bias_; }

 private:
  int in_;
  int cells_;
  Param<T> w_input_;   // (4 * cells, in)
  Param<T> w_hidden_;  // (4 * cells, cells)
  Param<T> bias_;      // (4 * cells)

  bool has_initial_ = false;
  LstmState<T> initial_;
  LstmState<T> final_;

  int steps_ = 0;
  int batch_ = 0;
  NumArray<T> input_;
  std::vector<NumArray<T>> h_prev_, c_prev_, gates_, cell_, tanh_cell_;
};

// phi(tau)_j = ReLU(sum_{i<n} cos(pi i tau) w_{j,i} + b_j), weight shape
// (out, n). Input is a (rows, 1) column of quantile levels.
template <typename T>
class CosineEmbedding {
 public:
  CosineEmbedding(int n, int out);

  NumArray<T> Forward(const NumArray<T>& taus);
  // Gradients go to the weights only; quantile levels are not trained.
  void Backward(const NumArray<T>& grad_output);
  std::vector<Param<T>*> Params() { return {&weight_, &bias_}; }
  void Init(Rng& rng, const InitPolicy& policy);

  int basis_size() const { return n_; }
  int output_size() const { return out_; }
  Param<T>& weight() { return weight_; }
  Param<T>& bias() { return bias_; }

 private:
  int n_;
  int out_;
  Param<T> weight_;
  Param<T> bias_;
  NumArray<T> basis_;
  NumArray<T> output_;
};

// Elementwise product of features with quantile embeddings. Each feature row
// is shared by `repeat` consecutive embedding rows (one per sampled level), so
// output row r uses feature row r / repeat.
template <typename T>
NumArray<T> HadamardForward(const NumArray<T>& features,
                            const NumArray<T>& embedding, int repeat);

template <typename T>
void HadamardBackward(const NumArray<T>& features, const NumArray<T>& embedding,
                      int repeat, const NumArray<T>& grad_output,
                      NumArray<T>* grad_features, NumArray<T>* grad_embedding);

}  // namespace lhiqn::nn

#endif  // LHIQN_NN_LAYERS_H_
