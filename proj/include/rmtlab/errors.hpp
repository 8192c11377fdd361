#pragma once

#include <stdexcept>
#include <string>

namespace rmtlab {

// Every failure raised by the library derives from Error so callers can catch
// one type at the CLI boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RMTLAB_ERROR(Name)              \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

RMTLAB_ERROR(InvalidParameter);
RMTLAB_ERROR(DomainError);
RMTLAB_ERROR(IndexError);
RMTLAB_ERROR(NoOneCutSolution);
RMTLAB_ERROR(DegenerateSupport);
RMTLAB_ERROR(NotCritical);
RMTLAB_ERROR(AccuracyError);
RMTLAB_ERROR(InstabilityError);
RMTLAB_ERROR(ConvergenceError);
RMTLAB_ERROR(IntegrationError);
RMTLAB_ERROR(TruncationError);
RMTLAB_ERROR(IoError);
RMTLAB_ERROR(IrregularEdge);
RMTLAB_ERROR(ExperimentError);

#undef RMTLAB_ERROR

}  // namespace rmtlab
