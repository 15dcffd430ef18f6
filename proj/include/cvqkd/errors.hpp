#pragma once

#include <stdexcept>
#include <string>

namespace cvqkd {

// Bad inputs: out-of-range parameters, malformed files, schema violations.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures: non-convergent integrator, unphysical intermediate state.
class computation_error : public std::runtime_error {
public:
    explicit computation_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cvqkd
