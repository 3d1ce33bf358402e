#pragma once

// Small graphs with hand-derived closed forms, shared across the test
// binaries. Each builder returns the graph; the s_* functions return the
// exact S-matrix at z.

#include <complex>

#include "gscat/graph.hpp"

namespace gallery {

using gscat::Complex;
using gscat::Matrix;

// Single path, bare attachment vertex (no edges at all).
inline gscat::ScatteringGraph g0() {
    return gscat::ScatteringGraph(1, 0, Matrix::Zero(1, 1));
}
inline Matrix s_g0(Complex) {
    Matrix s(1, 1);
    s(0, 0) = -1.0;
    return s;
}

// Single path with self-loop weight c on the attachment vertex.
inline gscat::ScatteringGraph g1(double c) {
    Matrix h(1, 1);
    h(0, 0) = c;
    return gscat::ScatteringGraph(1, 0, h);
}
inline Matrix s_g1(double c, Complex z) {
    Matrix s(1, 1);
    s(0, 0) = (c - z) / (z * (1.0 - c * z));
    return s;
}

// Two paths joined by a single edge between their attachment vertices.
inline gscat::ScatteringGraph g2() {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 1) = 1.0;
    h(1, 0) = 1.0;
    return gscat::ScatteringGraph(2, 0, h);
}
inline Matrix s_g2(Complex z) {
    Matrix s = Matrix::Zero(2, 2);
    s(0, 1) = 1.0 / z;
    s(1, 0) = 1.0 / z;
    return s;
}

// Two paths joined through one internal vertex.
inline gscat::ScatteringGraph g3() {
    Matrix h = Matrix::Zero(3, 3);
    h(0, 2) = h(2, 0) = 1.0;
    h(1, 2) = h(2, 1) = 1.0;
    return gscat::ScatteringGraph(2, 1, h);
}
inline Matrix s_g3(Complex) {
    Matrix s = Matrix::Zero(2, 2);
    s(0, 1) = 1.0;
    s(1, 0) = 1.0;
    return s;
}

// One path, two internal vertices both hanging off the attachment vertex.
inline gscat::ScatteringGraph g4() {
    Matrix h = Matrix::Zero(3, 3);
    h(0, 1) = h(1, 0) = 1.0;
    h(0, 2) = h(2, 0) = 1.0;
    return gscat::ScatteringGraph(1, 2, h);
}
inline Matrix s_g4(Complex) {
    Matrix s(1, 1);
    s(0, 0) = 1.0;
    return s;
}

}  // namespace gallery
