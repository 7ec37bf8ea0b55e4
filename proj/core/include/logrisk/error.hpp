#pragma once

#include <stdexcept>
#include <string>

namespace logrisk {

/// Error categories. The numeric value is the CLI exit code.
enum class ErrorKind : int {
    config = 1,
    data = 2,
    numeric = 3,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

    /// Pipeline stage that raised the error, empty outside the pipeline.
    const std::string& stage() const noexcept { return stage_; }
    void set_stage(std::string stage) { stage_ = std::move(stage); }

private:
    ErrorKind kind_;
    std::string stage_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

// Config family.
class ParameterError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Data family.
class IoError : public DataError {
public:
    using DataError::DataError;
};

class SchemaError : public DataError {
public:
    using DataError::DataError;
};

class EmptyDatasetError : public DataError {
public:
    using DataError::DataError;
};

// Numeric family.
class DomainError : public NumericError {
public:
    using NumericError::NumericError;
};

class EmptyTailError : public NumericError {
public:
    using NumericError::NumericError;
};

class DegenerateTailError : public NumericError {
public:
    using NumericError::NumericError;
};

class InsufficientDataError : public NumericError {
public:
    using NumericError::NumericError;
};

class ConvergenceError : public NumericError {
public:
    using NumericError::NumericError;
};

class NegligibleSupportError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace logrisk
