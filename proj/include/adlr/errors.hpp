#pragma once

#include <stdexcept>
#include <string>

namespace adlr {

// Base for all library errors so callers can catch everything from one place.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text (bad row, bad timestamp). Message carries the line number.
struct ParseError : Error {
    using Error::Error;
};

// Input references identifiers (sensors, labels) unknown to the home metadata.
struct SchemaError : Error {
    using Error::Error;
};

// Invalid or incomplete configuration (metadata, thresholds, ranges, templates).
struct ConfigError : Error {
    using Error::Error;
};

// HTTP transport failure after retries were exhausted.
struct TransportError : Error {
    using Error::Error;
};

// Strict replay mode was asked for a request that is not in the cache.
struct CacheMissError : Error {
    using Error::Error;
};

// The LLM output could not be mapped to a candidate activity label.
struct ExtractionError : Error {
    using Error::Error;
};

// Example selection was asked to do something impossible (empty pool, k == 0).
struct SelectionError : Error {
    using Error::Error;
};

// Prediction/truth bookkeeping problems while scoring.
struct ScoringError : Error {
    using Error::Error;
};

}  // namespace adlr
