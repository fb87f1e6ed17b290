#pragma once

#include <stdexcept>
#include <string>

namespace coretail {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// parameter / domain validation
struct InvalidParams : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct MomentUndefined : Error { using Error::Error; };

// ingestion
struct EmptyInput : Error { using Error::Error; };
struct NonPositiveValue : Error { using Error::Error; };
struct DegenerateSample : Error { using Error::Error; };

// solvers
struct NoSignChange : Error { using Error::Error; };
struct MaxIterExceeded : Error { using Error::Error; };

// estimators
struct NoTailData : Error { using Error::Error; };
struct NoSolutionInRange : Error { using Error::Error; };
struct NoValidBeta : Error { using Error::Error; };
struct NoValidFit : Error { using Error::Error; };

// file handling
struct IoError : Error { using Error::Error; };

struct ParseError : Error {
  ParseError(const std::string& msg, long line_no)
      : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
  long line;
};

}  // namespace coretail
