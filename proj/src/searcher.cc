/*
 * Copyright 2026 The pasha Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pasha/searcher.h"

#include <numeric>
#include <string>
#include <utility>

#include "pasha/error.h"

namespace pasha {

RandomSearcher::RandomSearcher(std::size_t universe_size, std::uint64_t seed)
    : pool_(universe_size), rng_(seed) {
  std::iota(pool_.begin(), pool_.end(), std::size_t{0});
}

std::size_t RandomSearcher::Draw() {
  if (next_ >= pool_.size()) {
    throw DataError("search space exhausted: all " + std::to_string(pool_.size()) +
                    " configurations already drawn");
  }
  // Lazy Fisher-Yates: only the drawn prefix is shuffled.
  std::uniform_int_distribution<std::size_t> pick(next_, pool_.size() - 1);
  std::swap(pool_[next_], pool_[pick(rng_)]);
  return pool_[next_++];
}

}  // namespace pasha
