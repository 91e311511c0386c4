#pragma once

#include <stdexcept>
#include <string>

namespace fewg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FEWG_DECLARE_ERROR(Name)              \
  class Name : public Error {                 \
   public:                                    \
    explicit Name(const std::string& what)    \
        : Error(std::string(#Name ": ") + what) {} \
  }

FEWG_DECLARE_ERROR(OutOfBand);
FEWG_DECLARE_ERROR(DomainError);
FEWG_DECLARE_ERROR(NoGuidedMode);
FEWG_DECLARE_ERROR(ConvergenceFailure);
FEWG_DECLARE_ERROR(InsufficientSamples);
FEWG_DECLARE_ERROR(AmbiguousTracking);
FEWG_DECLARE_ERROR(BandTruncated);
FEWG_DECLARE_ERROR(SupportViolation);
FEWG_DECLARE_ERROR(QuadratureFailure);
FEWG_DECLARE_ERROR(SingularPoint);
FEWG_DECLARE_ERROR(DegeneratePhaseMatching);
FEWG_DECLARE_ERROR(GridMismatch);
FEWG_DECLARE_ERROR(UnderResolvedComb);
FEWG_DECLARE_ERROR(DegenerateDispersion);
FEWG_DECLARE_ERROR(ConfigError);
FEWG_DECLARE_ERROR(CacheCorrupt);

#undef FEWG_DECLARE_ERROR

}  // namespace fewg
