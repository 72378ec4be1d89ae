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
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace supreg {

enum class ErrorCode {
    // ingestion and validation
    MissingColumn,
    DuplicateTimestamp,
    NonMonotonicTime,
    ParseError,
    GapTooLarge,
    EmptyInput,
    NegativeInput,
    LeadingGap,
    GapFound,
    ZeroVariance,
    MissingDriver,
    InvalidArgument,
    InvalidScenario,
    Io,
    // fitting and segmentation
    TooFewPoints,
    DegenerateRange,
    NonFinite,
    TooShort,
    OutOfRange,
    CostEvaluationFailure,
    TooLarge,
    // infeasible requests
    Unreachable,
    Unattainable,
    EmptyOverlap,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Broad class of a failure, used for CLI exit codes.
enum class ErrorClass { Input, Infeasible, Numerical };

ErrorClass classify(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Parse failure pinned to a 1-based line number of the source file.
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& message);

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

} // namespace supreg
