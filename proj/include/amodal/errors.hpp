#pragma once

#include <stdexcept>
#include <string>

namespace amodal {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad arguments or violated preconditions in pure computations.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Base for everything that went wrong on the model-backend side, so callers
// can distinguish backend trouble from pipeline logic bugs.
class BackendError : public Error {
public:
    using Error::Error;
};

class BackendUnavailableError : public BackendError {
public:
    BackendUnavailableError(const std::string& msg, int http_status)
        : BackendError(msg), http_status_(http_status) {}
    int http_status() const { return http_status_; }

private:
    int http_status_ = 0;
};

// Backend answered, but not in a shape we can use at the wire level.
class MalformedResponseError : public BackendError {
public:
    using BackendError::BackendError;
};

// Scripted test double ran out of matching entries.
class ScriptExhaustedError : public BackendError {
public:
    using BackendError::BackendError;
};

// Guidance text parsed fine as a response but carries no usable guidance.
class MalformedGuidanceError : public Error {
public:
    using Error::Error;
};

class GenerationFailedError : public Error {
public:
    using Error::Error;
};

class CompletionFailedError : public Error {
public:
    using Error::Error;
};

}  // namespace amodal
