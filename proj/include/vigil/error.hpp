#pragma once

#include <stdexcept>
#include <string>

namespace vigil {

// Malformed or inconsistent input data (bad JSON line, duplicate id, unknown
// label, a precondition on the data that does not hold).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vigil
