#pragma once

#include <stdexcept>
#include <string>

namespace banditboost {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class InvalidSpace : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class InvalidState : public Error {
public:
    using Error::Error;
};

class DivisionByZero : public Error {
public:
    using Error::Error;
};

// potential_exact refuses queries whose expansion exceeds the configured budget
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    enum class Kind { missing_file, missing_column, non_numeric, missing_value, empty_dataset, malformed };

    DataError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace banditboost
