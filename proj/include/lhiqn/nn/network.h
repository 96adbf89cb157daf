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

#ifndef LHIQN_NN_NETWORK_H_
#define LHIQN_NN_NETWORK_H_

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "lhiqn/nn/layers.h"
#include "lhiqn/nn/num_array.h"

namespace lhiqn::nn {

enum class LayerKind { kDense, kRelu, kConv2d, kLstm, kQuantileMerge };

std::string LayerKindName(LayerKind kind);

// One entry of a network description. `units` is the dense width, conv kernel
// count, LSTM cell count, or cosine basis size n for the quantile merge.
// fan_in/fan_out are filled in by NetworkSpec::Resolve().
struct LayerSpec {
  LayerKind kind = LayerKind::kDense;
  int units = 0;
  int kernel_size = 0;
  int stride = 1;
  int fan_in = 0;
  int fan_out = 0;

  bool operator==(const LayerSpec&) const = default;
};

struct NetworkSpec {
  std::vector<int> input_shape;  // (features) or (channels, height, width)
  std::vector<LayerSpec> layers;
  int num_actions = 0;

  // Checks that layer shapes compose, that any LSTM precedes the merge, that
  // at most one merge point exists, and that the last layer is a dense layer
  // with num_actions outputs. Returns a copy with fan-in/fan-out filled in.
  // Throws ConfigError.
  NetworkSpec Resolve() const;

  bool is_quantile() const;
  bool is_recurrent() const;
  int observation_size() const;

  bool operator==(const NetworkSpec&) const = default;
};

// Factories for the architectures used by the benchmarks.
struct MlpOptions {
  std::vector<int> trunk = {32, 64};
  int lstm_cells = 64;  // 0 disables the recurrent layer
  int embedding_n = 64;  // 0 builds a plain Q network
  std::vector<int> head = {32};
};
NetworkSpec MakeMlpSpec(int observation_size, int num_actions,
                        const MlpOptions& options);

struct ConvOptions {
  std::vector<int> kernels = {32, 64};
  std::vector<int> kernel_sizes = {3, 3};
  std::vector<int> strides = {2, 1};
  int trunk_dense = 1024;
  int lstm_cells = 0;
  int embedding_n = 64;
  std::vector<int> head = {1024};
};
NetworkSpec MakeConvSpec(int channels, int height, int width, int num_actions,
                         const ConvOptions& options);

// Per-LSTM-layer carried state, used while acting.
template <typename T>
using RecurrentState = std::vector<LstmState<T>>;

// A feed-forward or recurrent network with an optional quantile merge:
//   trunk(obs) -> [hadamard with cosine embedding of tau] -> head -> actions.
// Quantile networks produce one output row per (observation row, tau) pair:
// output row r * num_taus + k belongs to observation row r and tau row
// r * num_taus + k.
template <typename T>
class Network {
 public:
  explicit Network(const NetworkSpec& spec);
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  void Init(Rng& rng, const InitPolicy& policy = {});

  // obs: (steps * batch, observation...) time-major. taus: (rows * num_taus, 1)
  // for quantile networks, ignored otherwise. When `state` is given the LSTM
  // layers start from it and write their final state back; otherwise they
  // start from zero.
  const NumArray<T>& Forward(const NumArray<T>& obs, int steps,
                             const NumArray<T>& taus,
                             RecurrentState<T>* state = nullptr);
  // Accumulates parameter gradients for d(loss)/d(output).
  void Backward(const NumArray<T>& grad_output);

  std::vector<Param<T>*> Params();
  void ZeroGrad();

  // Zero state sized for `batch` rows.
  RecurrentState<T> ZeroState(int batch) const;

  const NetworkSpec& spec() const { return spec_; }
  int num_actions() const { return spec_.num_actions; }

  // Copies parameter values (not optimizer state) from `other`.
  // Throws ConfigError when the specs differ.
  void CopyParametersFrom(Network& other);

  // Text form: named arrays with shapes, values as hexadecimal floats, so a
  // save/load round trip is bit-exact.
  void Save(std::ostream& out);
  void Load(std::istream& in);

 private:
  NetworkSpec spec_;
  std::vector<std::unique_ptr<Layer<T>>> trunk_;
  std::unique_ptr<CosineEmbedding<T>> embedding_;
  std::vector<std::unique_ptr<Layer<T>>> head_;
  std::vector<Lstm<T>*> lstms_;

  int repeat_ = 1;
  NumArray<T> trunk_out_;
  NumArray<T> embed_out_;
  NumArray<T> output_;
};

// Target-network refresh: target values become bitwise copies of main values.
template <typename T>
void SyncTarget(Network<T>& main, Network<T>& target) {
  target.CopyParametersFrom(main);
}

}  // namespace lhiqn::nn

#endif  // LHIQN_NN_NETWORK_H_
