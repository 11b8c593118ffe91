#pragma once

#include <stdexcept>
#include <string>

namespace countgof {

// Parameter or moment outside the family's domain. `what()` names the
// violated inequality.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Sample admits no test statistic (all zeros, or plug-in variance ~ 0).
class DegenerateSampleError : public std::runtime_error {
public:
    explicit DegenerateSampleError(const std::string& what)
        : std::runtime_error(what) {}
};

// Request exceeds a configured table cap.
class CapacityError : public std::length_error {
public:
    explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

}  // namespace countgof
