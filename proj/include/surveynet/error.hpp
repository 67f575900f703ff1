#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace surveynet {

enum class ErrorCode {
    InvalidArgument,
    NotFound,
    EmptyGroup,
    NotPublished,
    PublishRejected,
    MissingCitation,
    DuplicateInstrument,
    UnknownItem,
    OutOfRange,
    SyntaxError,
    UnknownFunction,
    FreeTextReference,
    MissingAnswer,
    DivisionByZero,
    NotSubmitted,
    NoAlters,
    WaveClosed,
    NotInRoster,
    MissingRequired,
    TwoModeInput,
    UnknownEndpoint,
    SelfLoop,
    RelationMismatch,
    NoData,
    InsufficientData,
    UnknownFormat,
    UnknownPlaceholder,
    Denied,
    Unauthenticated,
    ImportRejected,
    Cancelled,
    Storage,
};

std::string_view to_string(ErrorCode code);

/// Base of every error the library throws. `code()` is stable and used by the HTTP layer.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace surveynet
