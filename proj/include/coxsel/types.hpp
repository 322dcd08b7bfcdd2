#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace coxsel {

using Index = Eigen::Index;

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Ordered list of covariate column indices (0-based).
using ColumnSet = std::vector<Index>;

template <class Scalar>
inline constexpr Scalar infinity = std::numeric_limits<Scalar>::infinity();

// Error hierarchy. The CLI maps InputError to exit code 2 and
// NumericalError to exit code 3.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: schema, parse, validation and configuration problems.
class InputError : public Error {
  public:
    using Error::Error;
};

class SchemaError : public InputError {
  public:
    using InputError::InputError;
};

class ParseError : public InputError {
  public:
    ParseError(const std::string& msg, std::size_t row, std::size_t column)
        : InputError(msg), row_(row), column_(column) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t row_;
    std::size_t column_;
};

class ValidationError : public InputError {
  public:
    using InputError::InputError;
};

class ConfigError : public InputError {
  public:
    using InputError::InputError;
};

/// Failure of a numerical routine (divergence, singularity, no events).
class NumericalError : public Error {
  public:
    using Error::Error;
};

}  // namespace coxsel
