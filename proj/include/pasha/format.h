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

// Text conversions for reals. FormatShortest emits the shortest decimal that
// parses back to the identical double, which keeps files and traces exact
// across a save/load round trip.

#ifndef PASHA_FORMAT_H_
#define PASHA_FORMAT_H_

#include <optional>
#include <string>
#include <string_view>

namespace pasha {

std::string FormatShortest(double value);
std::string FormatFixed(double value, int decimals);

// Whole-string parse; nullopt on any trailing garbage.
std::optional<double> ParseDouble(std::string_view text);
std::optional<long long> ParseInteger(std::string_view text);

std::string_view Trim(std::string_view text);

}  // namespace pasha

#endif  // PASHA_FORMAT_H_
