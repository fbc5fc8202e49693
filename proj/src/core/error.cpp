#include "core/error.hpp"

namespace kardashev {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kArgument: return "argument";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kIntegrity: return "integrity";
    case ErrorKind::kCompleteness: return "completeness";
    case ErrorKind::kEstimation: return "estimation";
    case ErrorKind::kCapability: return "capability";
    case ErrorKind::kModelIntegrity: return "model-integrity";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace kardashev
