#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hsd {

// Failure categories. The CLI maps each category onto its run record and exit
// code, so every exception thrown by the library carries exactly one.
enum class ErrorCategory {
  kShape,
  kConfiguration,
  kParse,
  kDivergence,
  kEstimation,
  kIterationLimit,
  kUsage,
  kIo,
};

inline std::string_view category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kShape: return "shape";
    case ErrorCategory::kConfiguration: return "configuration";
    case ErrorCategory::kParse: return "parse";
    case ErrorCategory::kDivergence: return "divergence";
    case ErrorCategory::kEstimation: return "estimation";
    case ErrorCategory::kIterationLimit: return "iteration-limit";
    case ErrorCategory::kUsage: return "usage";
    case ErrorCategory::kIo: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(std::string(category_name(category)) + " error: " + what),
        category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& what) : Error(ErrorCategory::kShape, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::kConfiguration, what) {}
};

struct DivergenceError : Error {
  explicit DivergenceError(const std::string& what) : Error(ErrorCategory::kDivergence, what) {}
};

struct EstimationError : Error {
  explicit EstimationError(const std::string& what) : Error(ErrorCategory::kEstimation, what) {}
};

struct IterationLimitError : Error {
  explicit IterationLimitError(const std::string& what)
      : Error(ErrorCategory::kIterationLimit, what) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error(ErrorCategory::kUsage, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCategory::kIo, what) {}
};

// Malformed file content. `offset` is the byte position where decoding failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t offset)
      : Error(ErrorCategory::kParse, what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace hsd
