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

#ifndef PHONODEC_TENSOR_H_
#define PHONODEC_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace phonodec {

using Shape = std::vector<int>;

std::size_t ShapeNumel(std::span<const int> shape);
std::string ShapeString(std::span<const int> shape);

// N-dimensional array of doubles in row-major order.
struct Tensor {
  Shape shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(Shape s, double fill = 0.0)
      : shape(std::move(s)), data(ShapeNumel(shape), fill) {}
  Tensor(Shape s, std::vector<double> values);

  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape.at(static_cast<std::size_t>(i)); }
  std::size_t numel() const { return data.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  bool AllFinite() const;
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

}  // namespace phonodec

#endif  // PHONODEC_TENSOR_H_
