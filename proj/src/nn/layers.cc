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

#include "lhiqn/nn/layers.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace lhiqn::nn {

std::string ShapeString(const std::vector<int>& shape) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << ", ";
    out << shape[i];
  }
  out << ")";
  return out.str();
}

namespace {

template <typename T>
void FillUniform(NumArray<T>& array, double bound, Rng& rng) {
  for (T& v : array.values()) {
    v = static_cast<T>((2.0 * Uniform01(rng) - 1.0) * bound);
  }
}

template <typename T>
T Sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

template <typename T>
void CheckRows(const NumArray<T>& input, int expected_cols, const char* layer) {
  if (input.cols() != expected_cols) {
    throw ConfigError(std::string(layer) + ": input has " +
                      std::to_string(input.cols()) + " features, expected " +
                      std::to_string(expected_cols));
  }
}

template <typename T>
Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> RowVec(const NumArray<T>& a) {
  return Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(
      a.data(), static_cast<Eigen::Index>(a.size()));
}

template <typename T>
Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>> RowVec(NumArray<T>& a) {
  return Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(
      a.data(), static_cast<Eigen::Index>(a.size()));
}

}  // namespace

// ---------------------------------------------------------------- Dense

template <typename T>
Dense<T>::Dense(int in, int out)
    : in_(in), out_(out), weight_("weight", {out, in}), bias_("bias", {out}) {
  if (in <= 0 || out <= 0) {
    throw ConfigError("dense: sizes must be positive, got " +
                      std::to_string(in) + " -> " + std::to_string(out));
  }
}

template <typename T>
void Dense<T>::Init(Rng& rng, const InitPolicy& policy) {
  const double bound = policy.scale / std::sqrt(static_cast<double>(in_));
  FillUniform(weight_.value, bound, rng);
  FillUniform(bias_.value, bound, rng);
}

template <typename T>
NumArray<T> Dense<T>::Forward(const NumArray<T>& input, int /*steps*/) {
  CheckRows(input, in_, "dense");
  input_ = input;
  NumArray<T> out({input.rows(), out_});
  auto y = out.matrix();
  y.noalias() = input.matrix() * weight_.value.matrix().transpose();
  y.rowwise() += RowVec(bias_.value);
  return out;
}

template <typename T>
NumArray<T> Dense<T>::Backward(const NumArray<T>& grad_output) {
  if (input_.empty()) throw UsageError("dense: Backward without Forward");
  CheckRows(grad_output, out_, "dense backward");
  const auto dy = grad_output.matrix();
  weight_.grad.matrix().noalias() += dy.transpose() * input_.matrix();
  RowVec(bias_.grad) += dy.colwise().sum();
  NumArray<T> dx(input_.shape());
  dx.matrix().noalias() = dy * weight_.value.matrix();
  return dx;
}

// ---------------------------------------------------------------- Relu

template <typename T>
NumArray<T> Relu<T>::Forward(const NumArray<T>& input, int /*steps*/) {
  output_ = input;
  for (T& v : output_.values()) v = v > T(0) ? v : T(0);
  return output_;
}

template <typename T>
NumArray<T> Relu<T>::Backward(const NumArray<T>& grad_output) {
  if (grad_output.size() != output_.size()) {
    throw ConfigError("relu: gradient shape mismatch");
  }
  NumArray<T> dx = grad_output;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    if (!(output_[i] > T(0))) dx[i] = T(0);
  }
  return dx;
}

// ---------------------------------------------------------------- Conv2d

template <typename T>
Conv2d<T>::Conv2d(int channels, int height, int width, int kernels,
                  int kernel_size, int stride)
    : channels_(channels),
      height_(height),
      width_(width),
      kernels_(kernels),
      kernel_size_(kernel_size),
      stride_(stride),
      out_height_(stride > 0 ? (height - kernel_size) / stride + 1 : 0),
      out_width_(stride > 0 ? (width - kernel_size) / stride + 1 : 0),
      weight_("weight", {kernels, channels, kernel_size, kernel_size}),
      bias_("bias", {kernels}) {
  if (channels <= 0 || kernels <= 0 || kernel_size <= 0 || stride <= 0) {
    throw ConfigError("conv2d: channels, kernels, kernel size and stride must be positive");
  }
  if (kernel_size > height || kernel_size > width || out_height_ <= 0 ||
      out_width_ <= 0) {
    throw ConfigError("conv2d: kernel " + std::to_string(kernel_size) +
                      " stride " + std::to_string(stride) + " on " +
                      std::to_string(height) + "x" + std::to_string(width) +
                      " input leaves no output positions");
  }
}

template <typename T>
void Conv2d<T>::Init(Rng& rng, const InitPolicy& policy) {
  const double fan_in = static_cast<double>(channels_) * kernel_size_ * kernel_size_;
  const double bound = policy.scale / std::sqrt(fan_in);
  FillUniform(weight_.value, bound, rng);
  FillUniform(bias_.value, bound, rng);
}

// cols is (channels * k * k, out_h * out_w), row-major.
template <typename T>
void Conv2d<T>::Im2Col(const T* image, T* cols) const {
  const int positions = out_height_ * out_width_;
  for (int c = 0; c < channels_; ++c) {
    for (int ky = 0; ky < kernel_size_; ++ky) {
      for (int kx = 0; kx < kernel_size_; ++kx) {
        const int row = (c * kernel_size_ + ky) * kernel_size_ + kx;
        T* dst = cols + static_cast<std::size_t>(row) * positions;
        for (int oy = 0; oy < out_height_; ++oy) {
          const T* src = image + (static_cast<std::size_t>(c) * height_ +
                                  oy * stride_ + ky) * width_ + kx;
          for (int ox = 0; ox < out_width_; ++ox) {
            dst[oy * out_width_ + ox] = src[ox * stride_];
          }
        }
      }
    }
  }
}

template <typename T>
void Conv2d<T>::Col2Im(const T* cols, T* image) const {
  const int positions = out_height_ * out_width_;
  for (int c = 0; c < channels_; ++c) {
    for (int ky = 0; ky < kernel_size_; ++ky) {
      for (int kx = 0; kx < kernel_size_; ++kx) {
        const int row = (c * kernel_size_ + ky) * kernel_size_ + kx;
        const T* src = cols + static_cast<std::size_t>(row) * positions;
        for (int oy = 0; oy < out_height_; ++oy) {
          T* dst = image + (static_cast<std::size_t>(c) * height_ +
                            oy * stride_ + ky) * width_ + kx;
          for (int ox = 0; ox < out_width_; ++ox) {
            dst[ox * stride_] += src[oy * out_width_ + ox];
          }
        }
      }
    }
  }
}

template <typename T>
NumArray<T> Conv2d<T>::Forward(const NumArray<T>& input, int /*steps*/) {
  CheckRows(input, channels_ * height_ * width_, "conv2d");
  const int batch = input.rows();
  const int patch = channels_ * kernel_size_ * kernel_size_;
  const int positions = out_height_ * out_width_;
  cols_ = NumArray<T>({batch * patch, positions});
  NumArray<T> out({batch, kernels_, out_height_, out_width_});
  const ConstMatrixMap<T> w(weight_.value.data(), kernels_, patch);
  for (int b = 0; b < batch; ++b) {
    T* cols = cols_.data() + static_cast<std::size_t>(b) * patch * positions;
    Im2Col(input.data() + static_cast<std::size_t>(b) * input.cols(), cols);
    MatrixMap<T> y(out.data() + static_cast<std::size_t>(b) * kernels_ * positions,
                   kernels_, positions);
    y.noalias() = w * ConstMatrixMap<T>(cols, patch, positions);
    for (int k = 0; k < kernels_; ++k) y.row(k).array() += bias_.value[k];
  }
  return out;
}

template <typename T>
NumArray<T> Conv2d<T>::Backward(const NumArray<T>& grad_output) {
  if (cols_.empty()) throw UsageError("conv2d: Backward without Forward");
  const int patch = channels_ * kernel_size_ * kernel_size_;
  const int positions = out_height_ * out_width_;
  CheckRows(grad_output, kernels_ * positions, "conv2d backward");
  const int batch = grad_output.rows();
  NumArray<T> dx({batch, channels_, height_, width_});
  const ConstMatrixMap<T> w(weight_.value.data(), kernels_, patch);
  MatrixMap<T> dw(weight_.grad.data(), kernels_, patch);
  RowMatrix<T> dcols(patch, positions);
  for (int b = 0; b < batch; ++b) {
    const T* cols = cols_.data() + static_cast<std::size_t>(b) * patch * positions;
    ConstMatrixMap<T> dy(
        grad_output.data() + static_cast<std::size_t>(b) * kernels_ * positions,
        kernels_, positions);
    dw.noalias() += dy * ConstMatrixMap<T>(cols, patch, positions).transpose();
    for (int k = 0; k < kernels_; ++k) bias_.grad[k] += dy.row(k).sum();
    dcols.noalias() = w.transpose() * dy;
    Col2Im(dcols.data(), dx.data() + static_cast<std::size_t>(b) * dx.cols());
  }
  return dx;
}

// ---------------------------------------------------------------- Lstm

template <typename T>
Lstm<T>::Lstm(int in, int cells)
    : in_(in),
      cells_(cells),
      w_input_("w_input", {4 * cells, in}),
      w_hidden_("w_hidden", {4 * cells, cells}),
      bias_("bias", {4 * cells}) {
  if (in <= 0 || cells <= 0) {
    throw ConfigError("lstm: sizes must be positive");
  }
}

template <typename T>
void Lstm<T>::Init(Rng& rng, const InitPolicy& policy) {
  const double bound = policy.scale / std::sqrt(static_cast<double>(cells_));
  FillUniform(w_input_.value, bound, rng);
  FillUniform(w_hidden_.value, bound, rng);
  FillUniform(bias_.value, bound, rng);
}

template <typename T>
NumArray<T> Lstm<T>::Forward(const NumArray<T>& input, int steps) {
  CheckRows(input, in_, "lstm");
  if (steps <= 0 || input.rows() % steps != 0) {
    throw ConfigError("lstm: " + std::to_string(input.rows()) +
                      " rows do not split into " + std::to_string(steps) +
                      " steps");
  }
  steps_ = steps;
  batch_ = input.rows() / steps;
  input_ = input;
  const int h = cells_;

  NumArray<T> hidden({batch_, h});
  NumArray<T> cell({batch_, h});
  if (has_initial_) {
    if (initial_.hidden.rows() != batch_ || initial_.hidden.cols() != h ||
        initial_.cell.rows() != batch_ || initial_.cell.cols() != h) {
      throw ConfigError("lstm: initial state shape does not match batch");
    }
    hidden = initial_.hidden;
    cell = initial_.cell;
    has_initial_ = false;
  }

  h_prev_.assign(steps, {});
  c_prev_.assign(steps, {});
  gates_.assign(steps, {});
  cell_.assign(steps, {});
  tanh_cell_.assign(steps, {});
  NumArray<T> out({batch_ * steps, h});
  const auto wx = w_input_.value.matrix();
  const auto wh = w_hidden_.value.matrix();
  const auto bias = RowVec(bias_.value);

  for (int t = 0; t < steps; ++t) {
    const ConstMatrixMap<T> x(input.data() + static_cast<std::size_t>(t) * batch_ * in_,
                              batch_, in_);
    NumArray<T> z({batch_, 4 * h});
    auto zm = z.matrix();
    zm.noalias() = x * wx.transpose();
    zm.noalias() += hidden.matrix() * wh.transpose();
    zm.rowwise() += bias;
    NumArray<T> next_cell({batch_, h});
    NumArray<T> tanh_c({batch_, h});
    for (int b = 0; b < batch_; ++b) {
      T* zr = z.data() + static_cast<std::size_t>(b) * 4 * h;
      for (int j = 0; j < h; ++j) {
        const T i_gate = Sigmoid(zr[j]);
        const T f_gate = Sigmoid(zr[h + j]);
        const T g_gate = std::tanh(zr[2 * h + j]);
        const T o_gate = Sigmoid(zr[3 * h + j]);
        zr[j] = i_gate;
        zr[h + j] = f_gate;
        zr[2 * h + j] = g_gate;
        zr[3 * h + j] = o_gate;
        const T c = f_gate * cell.at(b, j) + i_gate * g_gate;
        next_cell.at(b, j) = c;
        tanh_c.at(b, j) = std::tanh(c);
        out.at(t * batch_ + b, j) = o_gate * tanh_c.at(b, j);
      }
    }
    h_prev_[t] = hidden;
    c_prev_[t] = cell;
    gates_[t] = std::move(z);
    cell = next_cell;
    hidden = NumArray<T>({batch_, h});
    std::copy(out.data() + static_cast<std::size_t>(t) * batch_ * h,
              out.data() + static_cast<std::size_t>(t + 1) * batch_ * h,
              hidden.data());
    if (!cell.all_finite() || !hidden.all_finite()) {
      throw NumericError("lstm: non-finite state at step " + std::to_string(t));
    }
    cell_[t] = std::move(next_cell);
    tanh_cell_[t] = std::move(tanh_c);
  }
  final_.hidden = std::move(hidden);
  final_.cell = std::move(cell);
  return out;
}

template <typename T>
NumArray<T> Lstm<T>::Backward(const NumArray<T>& grad_output) {
  if (steps_ == 0) throw UsageError("lstm: Backward without Forward");
  CheckRows(grad_output, cells_, "lstm backward");
  if (grad_output.rows() != steps_ * batch_) {
    throw ConfigError("lstm backward: gradient rows do not match forward");
  }
  const int h = cells_;
  NumArray<T> dx({steps_ * batch_, in_});
  NumArray<T> dh_next({batch_, h});
  NumArray<T> dc_next({batch_, h});
  NumArray<T> dz({batch_, 4 * h});
  const auto wx = w_input_.value.matrix();
  const auto wh = w_hidden_.value.matrix();
  auto dwx = w_input_.grad.matrix();
  auto dwh = w_hidden_.grad.matrix();
  auto db = RowVec(bias_.grad);

  for (int t = steps_ - 1; t >= 0; --t) {
    const NumArray<T>& gates = gates_[t];
    for (int b = 0; b < batch_; ++b) {
      const T* g = gates.data() + static_cast<std::size_t>(b) * 4 * h;
      T* dzr = dz.data() + static_cast<std::size_t>(b) * 4 * h;
      for (int j = 0; j < h; ++j) {
        const T i_gate = g[j], f_gate = g[h + j], g_gate = g[2 * h + j],
                o_gate = g[3 * h + j];
        const T tc = tanh_cell_[t].at(b, j);
        const T dh = grad_output.at(t * batch_ + b, j) + dh_next.at(b, j);
        const T dc = dh * o_gate * (T(1) - tc * tc) + dc_next.at(b, j);
        dzr[j] = dc * g_gate * i_gate * (T(1) - i_gate);
        dzr[h + j] = dc * c_prev_[t].at(b, j) * f_gate * (T(1) - f_gate);
        dzr[2 * h + j] = dc * i_gate * (T(1) - g_gate * g_gate);
        dzr[3 * h + j] = dh * tc * o_gate * (T(1) - o_gate);
        dc_next.at(b, j) = dc * f_gate;
      }
    }
    const ConstMatrixMap<T> x(input_.data() + static_cast<std::size_t>(t) * batch_ * in_,
                              batch_, in_);
    const auto dzm = dz.matrix();
    dwx.noalias() += dzm.transpose() * x;
    dwh.noalias() += dzm.transpose() * h_prev_[t].matrix();
    db += dzm.colwise().sum();
    MatrixMap<T>(dx.data() + static_cast<std::size_t>(t) * batch_ * in_, batch_, in_)
        .noalias() = dzm * wx;
    dh_next.matrix().noalias() = dzm * wh;
  }
  return dx;
}

// ---------------------------------------------------------------- CosineEmbedding

template <typename T>
CosineEmbedding<T>::CosineEmbedding(int n, int out)
    : n_(n), out_(out), weight_("weight", {out, n}), bias_("bias", {out}) {
  if (n < 1 || out < 1) {
    throw ConfigError("cosine embedding: n and output size must be >= 1");
  }
}

template <typename T>
void CosineEmbedding<T>::Init(Rng& rng, const InitPolicy& policy) {
  const double bound = policy.scale / std::sqrt(static_cast<double>(n_));
  FillUniform(weight_.value, bound, rng);
  FillUniform(bias_.value, bound, rng);
}

template <typename T>
NumArray<T> CosineEmbedding<T>::Forward(const NumArray<T>& taus) {
  const int rows = taus.rows();
  if (taus.cols() != 1) throw ConfigError("cosine embedding: taus must be a column");
  basis_ = NumArray<T>({rows, n_});
  for (int r = 0; r < rows; ++r) {
    // cos(pi i tau) by the Chebyshev recurrence, evaluated in double.
    const double c1 = std::cos(std::numbers::pi * static_cast<double>(taus[r]));
    double prev = 1.0, cur = c1;
    T* row = basis_.data() + static_cast<std::size_t>(r) * n_;
    row[0] = T(1);
    if (n_ > 1) row[1] = static_cast<T>(c1);
    for (int i = 2; i < n_; ++i) {
      const double next = 2.0 * c1 * cur - prev;
      prev = cur;
      cur = next;
      row[i] = static_cast<T>(cur);
    }
  }
  output_ = NumArray<T>({rows, out_});
  auto y = output_.matrix();
  y.noalias() = basis_.matrix() * weight_.value.matrix().transpose();
  y.rowwise() += RowVec(bias_.value);
  for (T& v : output_.values()) v = v > T(0) ? v : T(0);
  return output_;
}

template <typename T>
void CosineEmbedding<T>::Backward(const NumArray<T>& grad_output) {
  if (output_.empty()) throw UsageError("cosine embedding: Backward without Forward");
  if (grad_output.size() != output_.size()) {
    throw ConfigError("cosine embedding: gradient shape mismatch");
  }
  NumArray<T> dz = grad_output;
  for (std::size_t i = 0; i < dz.size(); ++i) {
    if (!(output_[i] > T(0))) dz[i] = T(0);
  }
  weight_.grad.matrix().noalias() += dz.matrix().transpose() * basis_.matrix();
  RowVec(bias_.grad) += dz.matrix().colwise().sum();
}

// ---------------------------------------------------------------- Hadamard merge

template <typename T>
NumArray<T> HadamardForward(const NumArray<T>& features,
                            const NumArray<T>& embedding, int repeat) {
  if (repeat < 1 || features.cols() != embedding.cols() ||
      static_cast<long>(features.rows()) * repeat != embedding.rows()) {
    throw ConfigError("hadamard merge: features " + ShapeString(features.shape()) +
                      " x" + std::to_string(repeat) + " do not match embedding " +
                      ShapeString(embedding.shape()));
  }
  const int width = features.cols();
  NumArray<T> out({embedding.rows(), width});
  for (int r = 0; r < embedding.rows(); ++r) {
    const T* f = features.data() + static_cast<std::size_t>(r / repeat) * width;
    const T* e = embedding.data() + static_cast<std::size_t>(r) * width;
    T* o = out.data() + static_cast<std::size_t>(r) * width;
    for (int j = 0; j < width; ++j) o[j] = f[j] * e[j];
  }
  return out;
}

template <typename T>
void HadamardBackward(const NumArray<T>& features, const NumArray<T>& embedding,
                      int repeat, const NumArray<T>& grad_output,
                      NumArray<T>* grad_features, NumArray<T>* grad_embedding) {
  if (grad_output.shape() != embedding.shape()) {
    throw ConfigError("hadamard merge: gradient shape mismatch");
  }
  const int width = features.cols();
  *grad_features = NumArray<T>(features.shape());
  *grad_embedding = NumArray<T>(embedding.shape());
  for (int r = 0; r < embedding.rows(); ++r) {
    const std::size_t fr = static_cast<std::size_t>(r / repeat) * width;
    const std::size_t er = static_cast<std::size_t>(r) * width;
    for (int j = 0; j < width; ++j) {
      const T g = grad_output[er + j];
      (*grad_features)[fr + j] += g * embedding[er + j];
      (*grad_embedding)[er + j] = g * features[fr + j];
    }
  }
}

#define LHIQN_INSTANTIATE_LAYERS(T)                                           \
  template class Dense<T>;                                                    \
  template class Relu<T>;                                                     \
  template class Conv2d<T>;                                                   \
  template class Lstm<T>;                                                     \
  template class CosineEmbedding<T>;                                          \
  template NumArray<T> HadamardForward<T>(const NumArray<T>&,                 \
                                          const NumArray<T>&, int);           \
  template void HadamardBackward<T>(const NumArray<T>&, const NumArray<T>&,   \
                                    int, const NumArray<T>&, NumArray<T>*,    \
                                    NumArray<T>*);

LHIQN_INSTANTIATE_LAYERS(float)
LHIQN_INSTANTIATE_LAYERS(double)

#undef LHIQN_INSTANTIATE_LAYERS

}  // namespace lhiqn::nn
