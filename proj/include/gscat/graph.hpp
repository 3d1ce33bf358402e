#pragma once

#include <complex>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "gscat/errors.hpp"
#include "gscat/tolerances.hpp"

namespace gscat {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// A finite weighted Hermitian gadget with n attachment vertices (indices
// 0..n-1, one semi-infinite path each) and m internal vertices (indices
// n..n+m-1). Immutable after construction.
class ScatteringGraph {
  public:
    ScatteringGraph(int n, int m, Matrix hhat, ToleranceConfig tol = {})
        : n_(n), m_(m), hhat_(std::move(hhat)), tol_(tol) {
        tol_.validate();
        if (n_ < 1) throw ValidationError("need at least one attachment vertex (n >= 1)");
        if (m_ < 0) throw ValidationError("internal vertex count m must be >= 0");
        const int sz = n_ + m_;
        if (hhat_.rows() != sz || hhat_.cols() != sz) {
            throw ValidationError("hhat must be (m+n) x (m+n)");
        }
        if (!hhat_.allFinite()) throw ValidationError("hhat entries must be finite");
        const double scale = hhat_.cwiseAbs().maxCoeff();
        const double herm = (hhat_ - hhat_.adjoint()).cwiseAbs().maxCoeff();
        if (herm > tol_.eps_herm * std::max(scale, 1.0)) {
            throw ValidationError("hhat is not Hermitian within eps_herm");
        }
    }

    int n() const { return n_; }
    int m() const { return m_; }
    int size() const { return n_ + m_; }

    const Matrix& hhat() const { return hhat_; }
    const ToleranceConfig& tol() const { return tol_; }

    Matrix block_a() const { return hhat_.topLeftCorner(n_, n_); }
    Matrix block_b() const { return hhat_.bottomLeftCorner(m_, n_); }
    Matrix block_d() const { return hhat_.bottomRightCorner(m_, m_); }

  private:
    int n_;
    int m_;
    Matrix hhat_;
    ToleranceConfig tol_;
};

// Diagonal projector onto the attachment vertices (restriction of the
// path projector to the gadget). Idempotent exactly.
inline RealMatrix projector_pn(const ScatteringGraph& g) {
    RealMatrix p = RealMatrix::Zero(g.size(), g.size());
    for (int i = 0; i < g.n(); ++i) p(i, i) = 1.0;
    return p;
}

// A vertex of the infinite graph: either path coordinate (x, j) with
// x >= 1 on path j (x = 1 is the attachment vertex itself), or an
// internal gadget vertex w in 0..m-1.
struct Vertex {
    enum class Kind { Path, Internal };
    Kind kind;
    int path = 0;      // path index j, 0-based
    int x = 0;         // distance along the path, x >= 1
    int internal = 0;  // internal vertex index, 0-based

    static Vertex on_path(int j, int x) {
        Vertex v;
        v.kind = Kind::Path;
        v.path = j;
        v.x = x;
        return v;
    }
    static Vertex internal_vertex(int w) {
        Vertex v;
        v.kind = Kind::Internal;
        v.internal = w;
        return v;
    }
};

}  // namespace gscat
