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

#ifndef LHIQN_NN_ADAM_H_
#define LHIQN_NN_ADAM_H_

#include <span>

#include "lhiqn/nn/num_array.h"

namespace lhiqn::nn {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam update of every parameter from its accumulated
// gradient, then zeroes the gradients. Per-sample learning-rate scaling is
// expected to be folded into the gradients beforehand.
// Throws NumericError if any gradient is non-finite; nothing is updated then.
template <typename T>
void AdamStep(std::span<Param<T>* const> params, double lr,
              const AdamOptions& options = {});

}  // namespace lhiqn::nn

#endif  // LHIQN_NN_ADAM_H_
