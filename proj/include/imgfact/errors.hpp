#pragma once

#include <stdexcept>
#include <string>

namespace imgfact {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Corrupted, truncated or version-mismatched files and malformed encodings.
class FormatError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class EmbeddingError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Failure of an external service (RIS, scraper, LLM, thumbnail host).
// Retryable errors are transient (timeouts, rate limits, 5xx); fatal ones
// (auth, bad request) should not be retried.
class ProviderError : public Error {
public:
    ProviderError(const std::string& msg, bool retryable)
        : Error(msg), retryable_(retryable) {}
    bool retryable() const { return retryable_; }

private:
    bool retryable_;
};

// The prompt would not fit the model context window.
class ContextOverflow : public Error {
public:
    using Error::Error;
};

class TemplateError : public Error {
public:
    using Error::Error;
};

class ImageEncodeError : public Error {
public:
    using Error::Error;
};

// Response text is not valid JSON.
class ParseError : public Error {
public:
    using Error::Error;
};

// JSON parsed but violates the expected response schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

class TooManySources : public Error {
public:
    using Error::Error;
};

class ModeMismatch : public Error {
public:
    using Error::Error;
};

class EmptyCorpus : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class ThumbFetchError : public Error {
public:
    using Error::Error;
};

} // namespace imgfact
