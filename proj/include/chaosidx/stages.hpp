/*
 * Copyright 2026 The chaosidx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CHAOSIDX_STAGES_HPP
#define CHAOSIDX_STAGES_HPP

#include <chaosidx/error.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>

namespace chaosidx {

enum class SleepStage { Wake, REM, S1, S2, S3, S4, Unknown };

/// The six scored stages, in report order.
inline constexpr std::array<SleepStage, 6> kScoredStages = {
    SleepStage::Wake, SleepStage::REM, SleepStage::S1, SleepStage::S2, SleepStage::S3, SleepStage::S4};

inline const char* to_string(SleepStage s) {
  switch (s) {
    case SleepStage::Wake: return "Wake";
    case SleepStage::REM: return "REM";
    case SleepStage::S1: return "S1";
    case SleepStage::S2: return "S2";
    case SleepStage::S3: return "S3";
    case SleepStage::S4: return "S4";
    case SleepStage::Unknown: return "Unknown";
  }
  return "Unknown";
}

/// Hypnogram tokens: W R 1 2 3 4 are the scored stages; anything else
/// (including '?' and movement markers) is Unknown.
inline SleepStage stage_from_token(std::string_view token) {
  if (token == "W") return SleepStage::Wake;
  if (token == "R") return SleepStage::REM;
  if (token == "1") return SleepStage::S1;
  if (token == "2") return SleepStage::S2;
  if (token == "3") return SleepStage::S3;
  if (token == "4") return SleepStage::S4;
  return SleepStage::Unknown;
}

/// Inverse of to_string(SleepStage), for re-reading emitted records.
inline SleepStage stage_from_name(std::string_view name) {
  for (auto s : kScoredStages)
    if (name == to_string(s)) return s;
  return SleepStage::Unknown;
}

enum class Group { Healthy, Apnea };

inline constexpr std::array<Group, 2> kGroups = {Group::Healthy, Group::Apnea};

inline const char* to_string(Group g) { return g == Group::Healthy ? "healthy" : "apnea"; }

inline Group parse_group(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "healthy") return Group::Healthy;
  if (lower == "apnea") return Group::Apnea;
  throw Error(ErrorKind::Input, "unknown group '" + std::string(name) + "' (expected healthy or apnea)");
}

}  // namespace chaosidx

#endif  // CHAOSIDX_STAGES_HPP
