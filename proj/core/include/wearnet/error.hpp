#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wearnet {

enum class ErrorKind {
  kParse,          // malformed numeric field
  kStructural,     // wrong column count, empty input, duplicate timestamps
  kFormat,         // file name or file header not in the expected format
  kRange,          // index or size out of range
  kIo,
  kDegenerateStatistics,
  kDomain,         // value outside the domain of a formula
  kCapacity,       // fewer points than clusters
  kShape,
  kBalance,
  kSplit,
  kDivergence,
  kConfig,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Process exit code for an error of this kind: 1 usage/config, 2 data, 3 divergence.
int exit_code(ErrorKind kind);

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace wearnet
