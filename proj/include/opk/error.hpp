#pragma once

#include <stdexcept>
#include <string>

namespace opk {

enum class ErrorCode {
    InvalidMatrix,
    NotPSD,
    InvalidGrid,
    InvalidMeasure,
    InvalidVector,
    InvalidPoint,
    NotRadial,
    UnsupportedJet,
    DuplicatePoints,
    IllConditioned,
    InvalidDescriptor,
    InternalError,
};

[[nodiscard]] const char *to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace opk
