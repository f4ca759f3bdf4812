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

#ifndef PASHA_SEARCHER_H_
#define PASHA_SEARCHER_H_

#include <cstdint>
#include <random>
#include <vector>

namespace pasha {

// Source of new configurations. Draw() returns the index of the next point of
// the search space (a row of a tabulated benchmark). A model-based searcher
// would implement this interface too; only random search ships.
class Searcher {
 public:
  virtual ~Searcher() = default;
  virtual std::size_t Draw() = 0;
};

// Uniform sampling without replacement over {0, ..., universe_size - 1}.
// Throws DataError once the universe is exhausted.
class RandomSearcher : public Searcher {
 public:
  RandomSearcher(std::size_t universe_size, std::uint64_t seed);

  std::size_t Draw() override;

  std::size_t remaining() const { return pool_.size() - next_; }

 private:
  std::vector<std::size_t> pool_;
  std::size_t next_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace pasha

#endif  // PASHA_SEARCHER_H_
