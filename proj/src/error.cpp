#include <surveynet/error.hpp>

namespace surveynet {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::NotPublished: return "NotPublished";
    case ErrorCode::PublishRejected: return "PublishRejected";
    case ErrorCode::MissingCitation: return "MissingCitation";
    case ErrorCode::DuplicateInstrument: return "DuplicateInstrument";
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::FreeTextReference: return "FreeTextReference";
    case ErrorCode::MissingAnswer: return "MissingAnswer";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::NotSubmitted: return "NotSubmitted";
    case ErrorCode::NoAlters: return "NoAlters";
    case ErrorCode::WaveClosed: return "WaveClosed";
    case ErrorCode::NotInRoster: return "NotInRoster";
    case ErrorCode::MissingRequired: return "MissingRequired";
    case ErrorCode::TwoModeInput: return "TwoModeInput";
    case ErrorCode::UnknownEndpoint: return "UnknownEndpoint";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::RelationMismatch: return "RelationMismatch";
    case ErrorCode::NoData: return "NoData";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::UnknownFormat: return "UnknownFormat";
    case ErrorCode::UnknownPlaceholder: return "UnknownPlaceholder";
    case ErrorCode::Denied: return "Denied";
    case ErrorCode::Unauthenticated: return "Unauthenticated";
    case ErrorCode::ImportRejected: return "ImportRejected";
    case ErrorCode::Cancelled: return "Cancelled";
    case ErrorCode::Storage: return "Storage";
    }
    return "Unknown";
}

} // namespace surveynet
