#pragma once

#include <stdexcept>
#include <string>

namespace lsmor {

// Base class for all library errors. Every subclass carries a stable
// machine-readable category tag next to the human-readable message so the
// CLI can emit structured error output.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}

    const std::string& category() const { return category_; }

private:
    std::string category_;
};

#define LSMOR_DEFINE_ERROR(Name, tag)                                   \
    struct Name : Error {                                               \
        explicit Name(const std::string& message) : Error(tag, message) {} \
    }

LSMOR_DEFINE_ERROR(DimensionMismatch, "dimension_mismatch");
LSMOR_DEFINE_ERROR(NotStable, "not_stable");
LSMOR_DEFINE_ERROR(NotSymmetric, "not_symmetric");
LSMOR_DEFINE_ERROR(NotPsd, "not_psd");
LSMOR_DEFINE_ERROR(NotPd, "not_pd");
LSMOR_DEFINE_ERROR(NearSingularHsv, "near_singular_hsv");
LSMOR_DEFINE_ERROR(HsvTie, "hsv_tie");
LSMOR_DEFINE_ERROR(BadOrder, "bad_order");
LSMOR_DEFINE_ERROR(NegativeRadicand, "negative_radicand");
LSMOR_DEFINE_ERROR(UnstableStep, "unstable_step");
LSMOR_DEFINE_ERROR(NonFinite, "non_finite");
LSMOR_DEFINE_ERROR(InvalidSpec, "invalid_spec");
LSMOR_DEFINE_ERROR(ResolutionTooLow, "resolution_too_low");
LSMOR_DEFINE_ERROR(StepTooLarge, "step_too_large");
LSMOR_DEFINE_ERROR(EigFailure, "eig_failure");
LSMOR_DEFINE_ERROR(IoError, "io_error");

#undef LSMOR_DEFINE_ERROR

}  // namespace lsmor
