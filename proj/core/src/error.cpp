#include "wearnet/error.hpp"

namespace wearnet {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kStructural: return "structural error";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kRange: return "range error";
    case ErrorKind::kIo: return "io error";
    case ErrorKind::kDegenerateStatistics: return "degenerate statistics";
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kCapacity: return "capacity error";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kBalance: return "balance error";
    case ErrorKind::kSplit: return "split error";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kConfig: return "config error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return 1;
    case ErrorKind::kDivergence: return 3;
    default: return 2;
  }
}

void raise(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace wearnet
