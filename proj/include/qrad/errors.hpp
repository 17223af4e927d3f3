#pragma once

#include <stdexcept>
#include <string>

namespace qrad {

// Error classes map 1:1 onto CLI exit codes (see tools/qrad.cpp):
//   usage 2, validation 3, non-convergence 4, coverage 5.

struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct convergence_error : std::runtime_error {
    explicit convergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct coverage_error : std::runtime_error {
    explicit coverage_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace qrad
