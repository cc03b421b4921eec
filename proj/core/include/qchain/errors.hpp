#pragma once

#include <stdexcept>

namespace qchain {

// Base for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The caller supplied values that fail validation.
struct ValidationError : Error {
    using Error::Error;
};

// A broken internal contract; indicates a bug rather than bad input.
struct InternalError : Error {
    using Error::Error;
};

struct ZeroVector : ValidationError { using ValidationError::ValidationError; };
struct NotNormalized : ValidationError { using ValidationError::ValidationError; };
struct NotOrdered : ValidationError { using ValidationError::ValidationError; };
struct Negative : ValidationError { using ValidationError::ValidationError; };
struct DimensionMismatch : ValidationError { using ValidationError::ValidationError; };
struct DegenerateChannel : ValidationError { using ValidationError::ValidationError; };
struct ZeroProbabilityOutcome : ValidationError { using ValidationError::ValidationError; };
struct IncompleteKraus : ValidationError { using ValidationError::ValidationError; };
struct TooManyHops : ValidationError { using ValidationError::ValidationError; };
struct GridOutOfRange : ValidationError { using ValidationError::ValidationError; };

struct IndexOutOfRange : InternalError { using InternalError::InternalError; };
struct DuplicateIndex : InternalError { using InternalError::InternalError; };
struct NoValidPairing : InternalError { using InternalError::InternalError; };

}  // namespace qchain
