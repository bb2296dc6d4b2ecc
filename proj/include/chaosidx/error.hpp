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

#ifndef CHAOSIDX_ERROR_HPP
#define CHAOSIDX_ERROR_HPP

#include <stdexcept>
#include <string>

namespace chaosidx {

enum class ErrorKind {
  Dimension,        // series too short for the requested embedding
  DegenerateInput,  // zero variance, all-duplicate points, non-finite samples
  Configuration,    // parameters outside their documented range
  EstimationFailure,
  NoScalingRegion,
  Input,            // unreadable / malformed files
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::EstimationFailure: return "estimation-failure";
    case ErrorKind::NoScalingRegion: return "no-scaling-region";
    case ErrorKind::Input: return "input";
  }
  return "unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace chaosidx

#endif  // CHAOSIDX_ERROR_HPP
