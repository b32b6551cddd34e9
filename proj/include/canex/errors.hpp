#pragma once

#include <stdexcept>
#include <string>

namespace canex {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A request exceeds one of the hard caps on exhaustive work (graph order, multiplicity, ...).
class SizeLimitError : public Error {
public:
    using Error::Error;
};

/// Arguments violate an operation's precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An integral or series could not be certified (tail test failed, non-finite result).
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace canex
