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

#ifndef PHONODEC_MATH_UTIL_H_
#define PHONODEC_MATH_UTIL_H_

#include <cmath>
#include <limits>
#include <span>

namespace phonodec {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow; -inf is the additive identity.
inline double LogAdd(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double LogSumExp(std::span<const double> values);

// In-place log-softmax of one vector.
void LogSoftmaxInPlace(std::span<double> values);

}  // namespace phonodec

#endif  // PHONODEC_MATH_UTIL_H_
