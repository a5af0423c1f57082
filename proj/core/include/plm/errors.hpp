// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace plm {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed arguments or data: dimension mismatch, empty batch, bad range.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// An operation was invoked on an object that violates its precondition
/// (e.g. organizing a net that is not acceptable on the batch).
class InvalidStateError : public Error {
public:
    using Error::Error;
};

/// Two instances share one input vector but cannot both be fit; carries the
/// offending pair of original dataset indices.
class DegenerateInstanceError : public Error {
public:
    DegenerateInstanceError(const std::string& msg, std::size_t first, std::size_t second)
        : Error(msg), first_index(first), second_index(second) {}

    std::size_t first_index;
    std::size_t second_index;
};

/// A rejection-sampling search exhausted its attempt budget.
class SamplingFailureError : public Error {
public:
    using Error::Error;
};

/// CSV / snapshot / report parsing failure; the message carries the location.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A lagged-feature schema asked for more history than the series provides.
class InsufficientHistoryError : public Error {
public:
    using Error::Error;
};

}  // namespace plm
