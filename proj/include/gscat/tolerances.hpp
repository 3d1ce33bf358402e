#pragma once

#include "gscat/errors.hpp"

namespace gscat {

// Canonical tolerance configuration shared by all numerics.
struct ToleranceConfig {
    double eps_herm = 1e-12;          // relative Hermiticity tolerance
    double eps_rank = 1e-9;           // relative singular-value cutoff for null spaces
    double eps_root_cluster = 1e-8;   // absolute root clustering radius
    double eps_snap = 1e-8;           // snap-to-real / snap-to-circle radius
    double eps_unitary = 1e-10;       // unitarity check tolerance
    double quad_target = 1e-8;        // quadrature absolute error target

    void validate() const {
        if (!(eps_herm > 0 && eps_rank > 0 && eps_root_cluster > 0 &&
              eps_snap > 0 && eps_unitary > 0 && quad_target > 0)) {
            throw ValidationError("tolerances must all be strictly positive");
        }
        if (eps_snap < eps_root_cluster) {
            throw ValidationError("eps_snap must be >= eps_root_cluster");
        }
    }
};

}  // namespace gscat
