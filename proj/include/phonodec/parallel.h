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

#ifndef PHONODEC_PARALLEL_H_
#define PHONODEC_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace phonodec {

// Runs fn(0..n-1) on up to `jobs` threads. Work items are claimed in index
// order; results must be written to per-index slots by the caller. If any
// call throws, the exception from the lowest failing index is rethrown
// after all workers finish.
void ParallelFor(std::size_t n, int jobs,
                 const std::function<void(std::size_t)>& fn);

}  // namespace phonodec

#endif  // PHONODEC_PARALLEL_H_
