#pragma once

#include <stdexcept>
#include <string>

namespace fbis {

enum class ErrorCode {
    // data / ingestion
    EmptyData,
    TooFewRows,
    ParseError,
    MissingColumn,
    NonNumericCell,
    MissingFile,
    // numerical / model
    NonFinite,
    DegenerateResponse,
    DegenerateFit,
    DegenerateSurrogate,
    InvalidDimension,
    InvalidRho,
    IndexOutOfRange,
    Unsupported,
    InvalidArgument,
};

const char* error_code_name(ErrorCode code);

// Exit-code classes used by the CLI: data errors -> 3, numerical errors -> 4.
bool is_data_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace fbis
