#pragma once

#include <stdexcept>
#include <string>

namespace mubench {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MUBENCH_DEFINE_ERROR(Name)            \
  class Name : public Error {                 \
   public:                                    \
    explicit Name(const std::string& what)    \
        : Error(std::string(#Name ": ") + what) {} \
  };

/// Malformed textual input (sequence, tree, functional name, formula).
MUBENCH_DEFINE_ERROR(ParseError)
/// A decision was requested on a presentation outside the decidable class.
MUBENCH_DEFINE_ERROR(UnsupportedPresentation)
/// Exploration or query tracing ran past its configured budget.
MUBENCH_DEFINE_ERROR(BudgetExceeded)
/// An extractor got disagreeing outputs but found no witness below its bound.
MUBENCH_DEFINE_ERROR(BoundViolation)
MUBENCH_DEFINE_ERROR(OutOfRange)
MUBENCH_DEFINE_ERROR(NotInCbar)
MUBENCH_DEFINE_ERROR(MalformedWitness)
MUBENCH_DEFINE_ERROR(NotATree)
MUBENCH_DEFINE_ERROR(MeasureZero)
MUBENCH_DEFINE_ERROR(UnsupportedFamily)
MUBENCH_DEFINE_ERROR(NotInternal)
MUBENCH_DEFINE_ERROR(NotNormalizable)

#undef MUBENCH_DEFINE_ERROR

}  // namespace mubench
