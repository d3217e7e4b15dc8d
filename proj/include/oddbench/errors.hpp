#pragma once

#include <stdexcept>
#include <string>

namespace oddbench {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or input data. The CLI maps these to exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Target and distractors would be indistinguishable.
class DegenerateStimulusError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class PreconditionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Files on disk disagree with each other (dimensions, duplicate ids, ...).
class IntegrityError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Filesystem failure. The CLI maps these to exit code 2.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace oddbench
