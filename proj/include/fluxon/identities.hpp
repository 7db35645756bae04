#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fluxon/gfunction.hpp"

namespace fluxon {

struct IdentityCheck {
    std::string name;
    int draws = 0;
    double max_error = 0.0;  // relative to the size of the terms involved
    double tol = 0.0;
    bool pass() const { return max_error <= tol; }
};

// Theta-function, elliptic and Jacobi identities over random admissible
// parameters drawn from a fixed seed.
std::vector<IdentityCheck> identity_suite(std::uint64_t seed = 20240607, int draws = 20);

// Relations that the catastrophe constants must satisfy.
std::vector<IdentityCheck> catastrophe_identities(const CatastropheData& c);

}  // namespace fluxon
