#pragma once

#include <stdexcept>
#include <string>

namespace fluctmat {

// Base class for all library errors. Specific types exist so callers and
// tests can distinguish failure modes without parsing messages.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define FLUCTMAT_DEFINE_ERROR(Name)                                    \
    struct Name : Error {                                              \
        explicit Name(const std::string& msg) : Error(msg) {}          \
    }

FLUCTMAT_DEFINE_ERROR(GroundMismatch);
FLUCTMAT_DEFINE_ERROR(GroundTooLarge);
FLUCTMAT_DEFINE_ERROR(SymmetryNeedsSignedGround);
FLUCTMAT_DEFINE_ERROR(SubsetNotContained);
FLUCTMAT_DEFINE_ERROR(GroundsOverlap);
FLUCTMAT_DEFINE_ERROR(WrongGroundSet);
FLUCTMAT_DEFINE_ERROR(DimensionMismatch);
FLUCTMAT_DEFINE_ERROR(BudgetExceeded);
FLUCTMAT_DEFINE_ERROR(NotCycleOrLoop);
FLUCTMAT_DEFINE_ERROR(ParityViolation);
FLUCTMAT_DEFINE_ERROR(ZeroModulus);
FLUCTMAT_DEFINE_ERROR(ShapeTooLarge);
FLUCTMAT_DEFINE_ERROR(DomainMismatch);
FLUCTMAT_DEFINE_ERROR(TooLargeForExactEnumeration);
FLUCTMAT_DEFINE_ERROR(SpecInvalid);
FLUCTMAT_DEFINE_ERROR(TraceNotZero);
FLUCTMAT_DEFINE_ERROR(IncompleteTable);
FLUCTMAT_DEFINE_ERROR(TooFewSamples);
FLUCTMAT_DEFINE_ERROR(OrderTooHigh);
FLUCTMAT_DEFINE_ERROR(ConfigParseError);
FLUCTMAT_DEFINE_ERROR(IoError);

#undef FLUCTMAT_DEFINE_ERROR

}  // namespace fluctmat
