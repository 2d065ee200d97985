#pragma once

#include <stdexcept>
#include <string>

namespace svloss {

// Violated precondition: bad shape, inadmissible connectivity, out-of-range
// parameter.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// Filesystem or container-format failure.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed textual input (SWC rows, array headers).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace svloss
