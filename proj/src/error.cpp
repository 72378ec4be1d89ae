/* Copyright 2026 The supreg Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <supreg/error.hpp>

namespace supreg {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::DuplicateTimestamp: return "DuplicateTimestamp";
    case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::GapTooLarge: return "GapTooLarge";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::LeadingGap: return "LeadingGap";
    case ErrorCode::GapFound: return "GapFound";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::MissingDriver: return "MissingDriver";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::Io: return "Io";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::CostEvaluationFailure: return "CostEvaluationFailure";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::Unattainable: return "Unattainable";
    case ErrorCode::EmptyOverlap: return "EmptyOverlap";
    }
    return "Unknown";
}

ErrorClass classify(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Unreachable:
    case ErrorCode::Unattainable:
    case ErrorCode::EmptyOverlap:
        return ErrorClass::Infeasible;
    case ErrorCode::CostEvaluationFailure:
    case ErrorCode::NonFinite:
        return ErrorClass::Numerical;
    default:
        return ErrorClass::Input;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ParseError::ParseError(std::size_t row, const std::string& message)
    : Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": " + message), row_(row) {}

} // namespace supreg
