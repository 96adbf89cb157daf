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

#include "lhiqn/nn/adam.h"

#include <cmath>
#include <string>

namespace lhiqn::nn {

template <typename T>
void AdamStep(std::span<Param<T>* const> params, double lr,
              const AdamOptions& options) {
  for (const Param<T>* p : params) {
    if (!p->grad.all_finite()) {
      throw NumericError("adam: non-finite gradient in parameter '" + p->name + "'");
    }
  }
  const T b1 = static_cast<T>(options.beta1);
  const T b2 = static_cast<T>(options.beta2);
  for (Param<T>* p : params) {
    ++p->step_count;
    const double t = static_cast<double>(p->step_count);
    const T corr1 = static_cast<T>(1.0 - std::pow(options.beta1, t));
    const T corr2 = static_cast<T>(1.0 - std::pow(options.beta2, t));
    const T rate = static_cast<T>(lr);
    const T eps = static_cast<T>(options.epsilon);
    T* value = p->value.data();
    T* grad = p->grad.data();
    T* m = p->adam_m.data();
    T* v = p->adam_v.data();
    const std::size_t n = p->value.size();
    for (std::size_t i = 0; i < n; ++i) {
      const T g = grad[i];
      m[i] = b1 * m[i] + (T(1) - b1) * g;
      v[i] = b2 * v[i] + (T(1) - b2) * g * g;
      const T m_hat = m[i] / corr1;
      const T v_hat = v[i] / corr2;
      value[i] -= rate * m_hat / (std::sqrt(v_hat) + eps);
      grad[i] = T(0);
    }
  }
}

template void AdamStep<float>(std::span<Param<float>* const>, double,
                              const AdamOptions&);
template void AdamStep<double>(std::span<Param<double>* const>, double,
                               const AdamOptions&);

}  // namespace lhiqn::nn
