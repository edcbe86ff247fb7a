#include "fbis/errors.hpp"

namespace fbis {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DegenerateResponse: return "DegenerateResponse";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::DegenerateSurrogate: return "DegenerateSurrogate";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::InvalidRho: return "InvalidRho";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

bool is_data_error(ErrorCode code) {
    switch (code) {
    case ErrorCode::EmptyData:
    case ErrorCode::TooFewRows:
    case ErrorCode::ParseError:
    case ErrorCode::MissingColumn:
    case ErrorCode::NonNumericCell:
    case ErrorCode::MissingFile:
    case ErrorCode::DegenerateResponse: // a property of the ingested data
        return true;
    default:
        return false;
    }
}

} // namespace fbis
