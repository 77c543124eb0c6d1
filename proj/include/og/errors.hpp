#pragma once

#include <stdexcept>
#include <string>

namespace og {

/// Numerical failure: singular system, indefinite matrix where a
/// definite one was required, divergence.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

/// The requested analysis does not apply to this instance class
/// (non-Eulerian graph fed to the Eulerian machinery, enumeration
/// guards exceeded, and so on).
class unsupported_error : public std::runtime_error {
public:
    explicit unsupported_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace og
