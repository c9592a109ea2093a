#pragma once

#include <stdexcept>
#include <string>

namespace vmma {

// Coarse failure classes. The CLI maps them onto exit codes.
enum class ErrorKind { Parameter, Data, Numerical, Io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Invalid argument values, shapes or unsupported regimes.
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error(ErrorKind::Parameter, what) {}
};

// Empty, degenerate or structurally unusable data.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

// Fits that do not converge and estimators with no valid inverse.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace vmma
