/*
 Copyright 2026 The slqmf Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slqmf {

/// Machine-readable failure categories. Every error raised by the library
/// carries exactly one code so that front ends can map failures to exit
/// statuses and single-line reasons.
enum class ErrorCode {
  kDimensionMismatch,
  kAsymmetricInput,
  kInvalidArgument,
  kNearSingularGain,
  kBlowUp,
  kPositivityViolated,
  kSingularP,
  kSingularG,
  kSingularSigma,
  kSingularHessian,
  kIllConditioned,
  kInfeasible,
  kUnsolvable,
  kCaseNotCovered,
  kIoError,
  kSchemaError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kAsymmetricInput: return "asymmetric_input";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNearSingularGain: return "near_singular_gain";
    case ErrorCode::kBlowUp: return "blow_up";
    case ErrorCode::kPositivityViolated: return "positivity_violated";
    case ErrorCode::kSingularP: return "singular_p";
    case ErrorCode::kSingularG: return "singular_g";
    case ErrorCode::kSingularSigma: return "singular_sigma";
    case ErrorCode::kSingularHessian: return "singular_hessian";
    case ErrorCode::kIllConditioned: return "ill_conditioned";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kUnsolvable: return "unsolvable";
    case ErrorCode::kCaseNotCovered: return "case_not_covered";
    case ErrorCode::kIoError: return "io_error";
    case ErrorCode::kSchemaError: return "schema_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

  /// True for failures caused by malformed input rather than by the
  /// mathematics of the problem instance.
  bool is_input_error() const noexcept {
    switch (code_) {
      case ErrorCode::kDimensionMismatch:
      case ErrorCode::kAsymmetricInput:
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kIoError:
      case ErrorCode::kSchemaError:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace slqmf
