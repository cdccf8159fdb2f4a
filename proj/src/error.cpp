#include "readrank/error.hpp"

namespace readrank {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyLead: return "EmptyLead";
    case ErrorCode::kMalformedInput: return "MalformedInput";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kDegenerateData: return "DegenerateData";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kUpstream: return "Upstream";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kInvalidRequest: return "InvalidRequest";
    case ErrorCode::kModelNotLoaded: return "ModelNotLoaded";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kFormat: return "Format";
  }
  return "Unknown";
}

}  // namespace readrank
