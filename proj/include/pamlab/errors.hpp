#pragma once

#include <stdexcept>
#include <string>

namespace pamlab {

/// Base of every error raised by the library. The concrete type names the
/// failure; what() carries the details.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define PAMLAB_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
  public:                                  \
    using Error::Error;                    \
  }

PAMLAB_DEFINE_ERROR(InvalidArgument);

// kernels
PAMLAB_DEFINE_ERROR(InvalidKernel);
PAMLAB_DEFINE_ERROR(DistributionalKernel);
PAMLAB_DEFINE_ERROR(SingularPoint);
PAMLAB_DEFINE_ERROR(QuadratureFailure);

// noise
PAMLAB_DEFINE_ERROR(NonPositiveSpectrum);
PAMLAB_DEFINE_ERROR(DomainTooSmall);

// scaling
PAMLAB_DEFINE_ERROR(UnclassifiableSequence);

// variational
PAMLAB_DEFINE_ERROR(SingularQuadratureDisabled);
PAMLAB_DEFINE_ERROR(NonPSD);
PAMLAB_DEFINE_ERROR(NoConvergence);
PAMLAB_DEFINE_ERROR(NegativeObjectiveStall);
PAMLAB_DEFINE_ERROR(NegativeInput);

// spectral
PAMLAB_DEFINE_ERROR(EigensolveFailure);
PAMLAB_DEFINE_ERROR(TruncationDominates);

// pam
PAMLAB_DEFINE_ERROR(StabilityViolation);

// moments
PAMLAB_DEFINE_ERROR(InsufficientBudget);

// cli / io
PAMLAB_DEFINE_ERROR(ConfigError);
PAMLAB_DEFINE_ERROR(FormatError);

#undef PAMLAB_DEFINE_ERROR

} // namespace pamlab
