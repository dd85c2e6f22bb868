#pragma once

#include <stdexcept>
#include <string>

namespace camnet {

// Base of every error thrown by the library. The CLI maps these to a
// non-zero exit code and prints what() on stderr.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unknown camera, missing travel window, missing CBTF entry.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed or inconsistent input data.
class InputError : public Error {
public:
    using Error::Error;
};

// A linking configuration violates the uniqueness constraint.
class FeasibilityError : public Error {
public:
    using Error::Error;
};

// A partition uses a link that is not in the candidate set.
class EncodingError : public Error {
public:
    using Error::Error;
};

// An assignment problem has a row without any admissible column.
class InfeasibleProblemError : public Error {
public:
    using Error::Error;
};

// An exhaustive oracle was asked to solve an instance above its size cap.
class SizeError : public Error {
public:
    using Error::Error;
};

class LearningError : public Error {
public:
    using Error::Error;
};

}  // namespace camnet
