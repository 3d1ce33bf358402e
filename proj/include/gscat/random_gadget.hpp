#pragma once

#include <random>

#include "gscat/graph.hpp"

namespace gscat {

// Random Hermitian gadget with weights uniform in [-2, 2] (plus an
// independent imaginary part on off-diagonal entries when requested).
inline ScatteringGraph random_gadget(std::mt19937_64& rng, int n, int m,
                                     bool complex_weights = true,
                                     const ToleranceConfig& tol = {}) {
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    const int sz = n + m;
    Matrix h = Matrix::Zero(sz, sz);
    for (int i = 0; i < sz; ++i) {
        h(i, i) = uni(rng);
        for (int j = i + 1; j < sz; ++j) {
            Complex w(uni(rng), complex_weights ? uni(rng) : 0.0);
            h(i, j) = w;
            h(j, i) = std::conj(w);
        }
    }
    return ScatteringGraph(n, m, h, tol);
}

}  // namespace gscat
