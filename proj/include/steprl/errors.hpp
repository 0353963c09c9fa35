#pragma once

#include <stdexcept>
#include <string>

namespace steprl {

/// Base class for all library errors. `code()` is a stable machine-readable
/// identifier; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define STEPRL_DEFINE_ERROR(NAME)                                  \
    class NAME : public Error {                                    \
    public:                                                        \
        explicit NAME(const std::string& message)                  \
            : Error(#NAME, message) {}                             \
    }

// reasoning core
STEPRL_DEFINE_ERROR(NoBoxedAnswer);
STEPRL_DEFINE_ERROR(UnbalancedBraces);
STEPRL_DEFINE_ERROR(EmptyInput);
STEPRL_DEFINE_ERROR(MalformedStep);
STEPRL_DEFINE_ERROR(NonContiguousIds);

// dedup
STEPRL_DEFINE_ERROR(DuplicateId);

// curation
STEPRL_DEFINE_ERROR(AnnotatorFailure);

// toy environment
STEPRL_DEFINE_ERROR(InvalidConfig);
STEPRL_DEFINE_ERROR(LengthMismatch);

// model
STEPRL_DEFINE_ERROR(ShapeMismatch);
STEPRL_DEFINE_ERROR(StaleTrace);
STEPRL_DEFINE_ERROR(CorruptCheckpoint);
STEPRL_DEFINE_ERROR(MissingCheckpoint);

// trainers
STEPRL_DEFINE_ERROR(UnknownDataset);
STEPRL_DEFINE_ERROR(InsufficientPairs);

// evaluation
STEPRL_DEFINE_ERROR(InvalidSettings);

// file plumbing
STEPRL_DEFINE_ERROR(IoError);

#undef STEPRL_DEFINE_ERROR

} // namespace steprl
