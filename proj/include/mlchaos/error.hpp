#pragma once

#include <stdexcept>
#include <string>

namespace mlchaos {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters or configuration outside the documented invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of a map (x <= 0, log of a non-positive value, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure did not reach its tolerance or produced an invalid state.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace mlchaos
