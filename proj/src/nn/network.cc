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

#include "lhiqn/nn/network.h"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace lhiqn::nn {

std::string LayerKindName(LayerKind kind) {
  switch (kind) {
    case LayerKind::kDense: return "dense";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kLstm: return "lstm";
    case LayerKind::kQuantileMerge: return "quantile_merge";
  }
  return "unknown";
}

namespace {

int Product(const std::vector<int>& shape) {
  int n = 1;
  for (int d : shape) n *= d;
  return n;
}

}  // namespace

NetworkSpec NetworkSpec::Resolve() const {
  if (input_shape.empty() || (input_shape.size() != 1 && input_shape.size() != 3)) {
    throw ConfigError("network: input shape must be (features) or (channels, height, width)");
  }
  for (int d : input_shape) {
    if (d <= 0) throw ConfigError("network: input dimensions must be positive");
  }
  if (num_actions <= 0) throw ConfigError("network: num_actions must be positive");
  if (layers.empty()) throw ConfigError("network: no layers");

  NetworkSpec out = *this;
  std::vector<int> shape = input_shape;
  int merges = 0;
  for (std::size_t i = 0; i < out.layers.size(); ++i) {
    LayerSpec& layer = out.layers[i];
    const std::string where = "network layer " + std::to_string(i) + " (" +
                              LayerKindName(layer.kind) + "): ";
    layer.fan_in = Product(shape);
    switch (layer.kind) {
      case LayerKind::kDense:
        if (layer.units <= 0) throw ConfigError(where + "units must be positive");
        shape = {layer.units};
        break;
      case LayerKind::kRelu:
        break;
      case LayerKind::kConv2d: {
        if (shape.size() != 3) throw ConfigError(where + "needs a (channels, height, width) input");
        if (layer.units <= 0 || layer.kernel_size <= 0 || layer.stride <= 0) {
          throw ConfigError(where + "kernels, kernel size and stride must be positive");
        }
        const int oh = shape[1] >= layer.kernel_size
                           ? (shape[1] - layer.kernel_size) / layer.stride + 1 : 0;
        const int ow = shape[2] >= layer.kernel_size
                           ? (shape[2] - layer.kernel_size) / layer.stride + 1 : 0;
        if (oh <= 0 || ow <= 0) throw ConfigError(where + "output dimension <= 0");
        shape = {layer.units, oh, ow};
        break;
      }
      case LayerKind::kLstm:
        if (merges > 0) {
          throw ConfigError(where + "recurrent layers must precede the quantile merge");
        }
        if (layer.units <= 0) throw ConfigError(where + "cells must be positive");
        shape = {layer.units};
        break;
      case LayerKind::kQuantileMerge:
        if (++merges > 1) throw ConfigError(where + "more than one quantile merge");
        if (layer.units < 1) throw ConfigError(where + "embedding size n must be >= 1");
        if (shape.size() != 1) throw ConfigError(where + "merge needs a flat feature vector");
        break;
    }
    layer.fan_out = Product(shape);
  }
  const LayerSpec& last = out.layers.back();
  if (last.kind != LayerKind::kDense || last.units != num_actions) {
    throw ConfigError("network: last layer must be dense with " +
                      std::to_string(num_actions) + " outputs");
  }
  return out;
}

bool NetworkSpec::is_quantile() const {
  for (const LayerSpec& l : layers) {
    if (l.kind == LayerKind::kQuantileMerge) return true;
  }
  return false;
}

bool NetworkSpec::is_recurrent() const {
  for (const LayerSpec& l : layers) {
    if (l.kind == LayerKind::kLstm) return true;
  }
  return false;
}

int NetworkSpec::observation_size() const { return Product(input_shape); }

NetworkSpec MakeMlpSpec(int observation_size, int num_actions,
                        const MlpOptions& options) {
  NetworkSpec spec;
  spec.input_shape = {observation_size};
  spec.num_actions = num_actions;
  for (int units : options.trunk) {
    spec.layers.push_back({LayerKind::kDense, units});
    spec.layers.push_back({LayerKind::kRelu});
  }
  if (options.lstm_cells > 0) spec.layers.push_back({LayerKind::kLstm, options.lstm_cells});
  if (options.embedding_n > 0) {
    spec.layers.push_back({LayerKind::kQuantileMerge, options.embedding_n});
  }
  for (int units : options.head) {
    spec.layers.push_back({LayerKind::kDense, units});
    spec.layers.push_back({LayerKind::kRelu});
  }
  spec.layers.push_back({LayerKind::kDense, num_actions});
  return spec.Resolve();
}

NetworkSpec MakeConvSpec(int channels, int height, int width, int num_actions,
                         const ConvOptions& options) {
  if (options.kernels.size() != options.kernel_sizes.size() ||
      options.kernels.size() != options.strides.size()) {
    throw ConfigError("conv spec: kernels, kernel sizes and strides differ in length");
  }
  NetworkSpec spec;
  spec.input_shape = {channels, height, width};
  spec.num_actions = num_actions;
  for (std::size_t i = 0; i < options.kernels.size(); ++i) {
    spec.layers.push_back({LayerKind::kConv2d, options.kernels[i],
                           options.kernel_sizes[i], options.strides[i]});
    spec.layers.push_back({LayerKind::kRelu});
  }
  if (options.trunk_dense > 0) {
    spec.layers.push_back({LayerKind::kDense, options.trunk_dense});
    spec.layers.push_back({LayerKind::kRelu});
  }
  if (options.lstm_cells > 0) spec.layers.push_back({LayerKind::kLstm, options.lstm_cells});
  if (options.embedding_n > 0) {
    spec.layers.push_back({LayerKind::kQuantileMerge, options.embedding_n});
  }
  for (int units : options.head) {
    spec.layers.push_back({LayerKind::kDense, units});
    spec.layers.push_back({LayerKind::kRelu});
  }
  spec.layers.push_back({LayerKind::kDense, num_actions});
  return spec.Resolve();
}

template <typename T>
Network<T>::Network(const NetworkSpec& spec) : spec_(spec.Resolve()) {
  std::vector<int> shape = spec_.input_shape;
  bool after_merge = false;
  for (const LayerSpec& l : spec_.layers) {
    std::unique_ptr<Layer<T>> layer;
    switch (l.kind) {
      case LayerKind::kDense:
        layer = std::make_unique<Dense<T>>(l.fan_in, l.units);
        break;
      case LayerKind::kRelu:
        layer = std::make_unique<Relu<T>>(shape);
        break;
      case LayerKind::kConv2d:
        layer = std::make_unique<Conv2d<T>>(shape[0], shape[1], shape[2], l.units,
                                            l.kernel_size, l.stride);
        break;
      case LayerKind::kLstm: {
        auto lstm = std::make_unique<Lstm<T>>(l.fan_in, l.units);
        lstms_.push_back(lstm.get());
        layer = std::move(lstm);
        break;
      }
      case LayerKind::kQuantileMerge:
        embedding_ = std::make_unique<CosineEmbedding<T>>(l.units, l.fan_in);
        after_merge = true;
        continue;
    }
    shape = layer->OutputShape();
    (after_merge ? head_ : trunk_).push_back(std::move(layer));
  }
}

template <typename T>
void Network<T>::Init(Rng& rng, const InitPolicy& policy) {
  for (auto& layer : trunk_) layer->Init(rng, policy);
  if (embedding_) embedding_->Init(rng, policy);
  for (auto& layer : head_) layer->Init(rng, policy);
}

template <typename T>
const NumArray<T>& Network<T>::Forward(const NumArray<T>& obs, int steps,
                                       const NumArray<T>& taus,
                                       RecurrentState<T>* state) {
  if (obs.cols() != spec_.observation_size()) {
    throw ConfigError("network: observation has " + std::to_string(obs.cols()) +
                      " elements, expected " +
                      std::to_string(spec_.observation_size()));
  }
  if (state != nullptr) {
    if (state->size() != lstms_.size()) {
      throw ConfigError("network: recurrent state has wrong layer count");
    }
    for (std::size_t i = 0; i < lstms_.size(); ++i) {
      lstms_[i]->set_initial_state((*state)[i]);
    }
  }
  NumArray<T> x = obs;
  for (auto& layer : trunk_) x = layer->Forward(x, steps);
  if (state != nullptr) {
    for (std::size_t i = 0; i < lstms_.size(); ++i) {
      (*state)[i] = lstms_[i]->final_state();
    }
  }
  if (embedding_) {
    if (taus.rows() == 0 || taus.rows() % x.rows() != 0) {
      throw ConfigError("network: " + std::to_string(taus.rows()) +
                        " quantile levels do not divide over " +
                        std::to_string(x.rows()) + " rows");
    }
    repeat_ = taus.rows() / x.rows();
    trunk_out_ = std::move(x);
    embed_out_ = embedding_->Forward(taus);
    x = HadamardForward(trunk_out_, embed_out_, repeat_);
  }
  for (auto& layer : head_) x = layer->Forward(x, steps);
  if (!x.all_finite()) throw NumericError("network: non-finite output");
  output_ = std::move(x);
  return output_;
}

template <typename T>
void Network<T>::Backward(const NumArray<T>& grad_output) {
  if (grad_output.shape() != output_.shape()) {
    throw ConfigError("network: gradient shape " + ShapeString(grad_output.shape()) +
                      " does not match output " + ShapeString(output_.shape()));
  }
  NumArray<T> g = grad_output;
  for (auto it = head_.rbegin(); it != head_.rend(); ++it) g = (*it)->Backward(g);
  if (embedding_) {
    NumArray<T> grad_features, grad_embedding;
    HadamardBackward(trunk_out_, embed_out_, repeat_, g, &grad_features,
                     &grad_embedding);
    embedding_->Backward(grad_embedding);
    g = std::move(grad_features);
  }
  for (auto it = trunk_.rbegin(); it != trunk_.rend(); ++it) g = (*it)->Backward(g);
}

template <typename T>
std::vector<Param<T>*> Network<T>::Params() {
  std::vector<Param<T>*> out;
  for (auto& layer : trunk_) {
    for (Param<T>* p : layer->Params()) out.push_back(p);
  }
  if (embedding_) {
    for (Param<T>* p : embedding_->Params()) out.push_back(p);
  }
  for (auto& layer : head_) {
    for (Param<T>* p : layer->Params()) out.push_back(p);
  }
  return out;
}

template <typename T>
void Network<T>::ZeroGrad() {
  for (Param<T>* p : Params()) p->zero_grad();
}

template <typename T>
RecurrentState<T> Network<T>::ZeroState(int batch) const {
  RecurrentState<T> state;
  for (const Lstm<T>* lstm : lstms_) {
    const int cells = lstm->OutputShape()[0];
    state.push_back({NumArray<T>({batch, cells}), NumArray<T>({batch, cells})});
  }
  return state;
}

template <typename T>
void Network<T>::CopyParametersFrom(Network& other) {
  if (!(other.spec_ == spec_)) {
    throw ConfigError("network: cannot copy parameters between different specs");
  }
  auto src = other.Params();
  auto dst = Params();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i]->value = src[i]->value;
}

namespace {

// Names are positional ("p<index>.<param>") so that any two networks built
// from the same spec agree on them.
template <typename T>
std::string ParamLabel(std::size_t index, const Param<T>& p) {
  return "p" + std::to_string(index) + "." + p.name;
}

}  // namespace

template <typename T>
void Network<T>::Save(std::ostream& out) {
  auto params = Params();
  out << "network " << params.size() << "\n";
  char buf[64];
  for (std::size_t i = 0; i < params.size(); ++i) {
    const NumArray<T>& v = params[i]->value;
    out << "array " << ParamLabel(i, *params[i]) << " " << v.rank();
    for (int d : v.shape()) out << " " << d;
    out << "\n";
    for (std::size_t k = 0; k < v.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%a", static_cast<double>(v[k]));
      out << (k == 0 ? "" : " ") << buf;
    }
    out << "\n";
  }
}

template <typename T>
void Network<T>::Load(std::istream& in) {
  auto params = Params();
  std::string word;
  std::size_t count = 0;
  if (!(in >> word >> count) || word != "network" || count != params.size()) {
    throw InputError("checkpoint: expected 'network " + std::to_string(params.size()) + "'");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::string label;
    int rank = 0;
    if (!(in >> word >> label >> rank) || word != "array" ||
        label != ParamLabel(i, *params[i])) {
      throw InputError("checkpoint: expected array " + ParamLabel(i, *params[i]));
    }
    std::vector<int> shape(rank);
    for (int& d : shape) in >> d;
    if (shape != params[i]->value.shape()) {
      throw InputError("checkpoint: array " + label + " has shape " +
                       ShapeString(shape) + ", network expects " +
                       ShapeString(params[i]->value.shape()));
    }
    for (std::size_t k = 0; k < params[i]->value.size(); ++k) {
      std::string token;
      if (!(in >> token)) throw InputError("checkpoint: truncated array " + label);
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0') {
        throw InputError("checkpoint: bad number '" + token + "' in " + label);
      }
      params[i]->value[k] = static_cast<T>(v);
    }
  }
}

template class Network<float>;
template class Network<double>;

}  // namespace lhiqn::nn
