// Copyright (c) 2026 The Phonodec Authors. All Rights Reserved.
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

#include "phonodec/tensor.h"

#include <algorithm>
#include <cmath>

#include "phonodec/errors.h"

namespace phonodec {

std::size_t ShapeNumel(std::span<const int> shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw ParameterError("negative tensor dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string ShapeString(std::span<const int> shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor::Tensor(Shape s, std::vector<double> values)
    : shape(std::move(s)), data(std::move(values)) {
  if (ShapeNumel(shape) != data.size()) {
    throw ParameterError("tensor shape " + ShapeString(shape) +
                         " does not match " + std::to_string(data.size()) +
                         " values");
  }
}

bool Tensor::AllFinite() const {
  return std::all_of(data.begin(), data.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace phonodec
