#pragma once

#include <cmath>
#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "gscat/graph.hpp"

namespace gscat {

// gamma(z) = z^2 (P_n - 1) + z*Hhat - 1
//          = [[zA - 1, zB^dag], [zB, zD - z^2 - 1]].
// Both forms are assembled here from the block layout; they coincide
// identically because the attachment vertices come first.
inline Matrix gamma_matrix(const ScatteringGraph& g, Complex z) {
    const int sz = g.size();
    Matrix out = z * g.hhat() - Matrix::Identity(sz, sz);
    const Complex z2 = z * z;
    for (int i = g.n(); i < sz; ++i) out(i, i) -= z2;
    return out;
}

inline Matrix d_gamma_dx(const ScatteringGraph& g, double x) {
    // d/dx [x^2 (P_n - 1) + x*Hhat - 1] = Hhat - 2x (1 - P_n)
    Matrix out = g.hhat();
    for (int i = g.n(); i < g.size(); ++i) out(i, i) -= 2.0 * x;
    return out;
}

// Q(z) = 1 - z (A + B^dag (1/z + z - D)^{-1} B).
inline Matrix q_matrix(const ScatteringGraph& g, Complex z) {
    if (z == Complex(0.0, 0.0)) throw ZeroArgument("q_matrix: z must be nonzero");
    const int n = g.n(), m = g.m();
    Matrix q = Matrix::Identity(n, n) - z * g.block_a();
    if (m > 0) {
        const Complex theta = 1.0 / z + z;
        const Matrix d = g.block_d();
        Eigen::SelfAdjointEigenSolver<Matrix> es(d);
        const double margin = g.tol().eps_rank * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff());
        for (int i = 0; i < m; ++i) {
            if (std::abs(theta - Complex(es.eigenvalues()(i), 0.0)) <= margin) {
                throw ResolventSingular("q_matrix: 1/z + z is an eigenvalue of D");
            }
        }
        const Matrix b = g.block_b();
        Matrix resolvent_b =
            (theta * Matrix::Identity(m, m) - d).partialPivLu().solve(b);
        q -= z * (b.adjoint() * resolvent_b);
    }
    return q;
}

enum class SMethod { ContinuationForm, QForm };

// S(z), internal amplitudes Psi(z) and det S at one spectral parameter.
struct SMatrixSample {
    Complex z;
    Matrix s;        // n x n
    Matrix psi;      // m x n, internal amplitude of each incoming state
    Complex det_s;
    SMethod method = SMethod::ContinuationForm;
};

// Evaluates S(z) through the analytic continuation -gamma(z)^{-1} gamma(1/z),
// whose upper-left n x n block is S(z) and whose lower-left block is
// Psi(z)/z. Caches the eigenvalues of D for the Q-form cross-check.
class SMatrixEvaluator {
  public:
    explicit SMatrixEvaluator(const ScatteringGraph& g, bool cross_check = true)
        : graph_(&g), cross_check_(cross_check) {
        if (g.m() > 0) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(g.block_d());
            d_eigs_ = es.eigenvalues();
            d_scale_ = 1.0 + d_eigs_.cwiseAbs().maxCoeff();
        }
    }

    SMatrixSample operator()(Complex z) const {
        const ScatteringGraph& g = *graph_;
        if (z == Complex(0.0, 0.0)) throw ZeroArgument("s_matrix: z must be nonzero");
        const int n = g.n(), m = g.m();
        const Matrix gz = gamma_matrix(g, z);
        Eigen::PartialPivLU<Matrix> lu(gz);
        // rcond is NaN for an exactly singular factorization; the negated
        // comparison catches that as well.
        if (!(lu.rcond() >= kRcondLimit)) {
            throw GammaSingular("s_matrix: gamma(z) numerically singular (root of W nearby)");
        }
        const Matrix full = -lu.solve(gamma_matrix(g, 1.0 / z));
        if (!full.allFinite()) {
            throw GammaSingular("s_matrix: gamma(z) numerically singular (root of W nearby)");
        }

        SMatrixSample sample;
        sample.z = z;
        sample.s = full.topLeftCorner(n, n);
        sample.psi = z * full.bottomLeftCorner(m, n);
        sample.method = SMethod::ContinuationForm;
        sample.det_s = Eigen::PartialPivLU<Matrix>(sample.s).determinant();

        // Lower-right block of the continuation matrix must be -1/z^2.
        if (m > 0) {
            const Complex inv_z2 = 1.0 / (z * z);
            const double lr_err =
                (full.bottomRightCorner(m, m) + inv_z2 * Matrix::Identity(m, m))
                    .cwiseAbs()
                    .maxCoeff();
            if (lr_err > 1e-9 * (1.0 + std::abs(inv_z2))) {
                throw GammaSingular("s_matrix: continuation self-check failed (ill-conditioned)");
            }
        }

        if (cross_check_) cross_check_q_form(z, sample.s);
        return sample;
    }

  private:
    void cross_check_q_form(Complex z, const Matrix& s) const {
        const ScatteringGraph& g = *graph_;
        const Complex theta = 1.0 / z + z;
        if (g.m() > 0) {
            double dist = std::numeric_limits<double>::infinity();
            for (int i = 0; i < d_eigs_.size(); ++i) {
                dist = std::min(dist, std::abs(theta - Complex(d_eigs_(i), 0.0)));
            }
            // Close to spec(D) the Q-form loses accuracy; the cancellation
            // is exactly what the continuation form exists to avoid.
            if (dist < 1e-3 * d_scale_) return;
        }
        const Matrix qz = q_matrix(g, z);
        Eigen::PartialPivLU<Matrix> lu(qz);
        if (lu.rcond() < 1e-10) return;  // S-matrix pole; continuation already screened
        const Matrix s_q = -lu.solve(q_matrix(g, 1.0 / z));
        const double err = (s_q - s).cwiseAbs().maxCoeff();
        if (err > 1e-8 * (1.0 + s.cwiseAbs().maxCoeff())) {
            throw Error("s_matrix: continuation and Q-form disagree");
        }
    }

    static constexpr double kRcondLimit = 1e-12;

    const ScatteringGraph* graph_;
    bool cross_check_;
    RealVector d_eigs_;
    double d_scale_ = 1.0;
};

inline SMatrixSample s_matrix(const ScatteringGraph& g, Complex z) {
    return SMatrixEvaluator(g)(z);
}

// Q-form evaluation -Q(z)^{-1} Q(1/z); independent of the continuation
// path, defined wherever the D-resolvent exists.
inline SMatrixSample s_matrix_q_form(const ScatteringGraph& g, Complex z) {
    SMatrixSample sample;
    sample.z = z;
    const Matrix qz = q_matrix(g, z);
    sample.s = -qz.partialPivLu().solve(q_matrix(g, 1.0 / z));
    sample.det_s = Eigen::PartialPivLU<Matrix>(sample.s).determinant();
    sample.method = SMethod::QForm;
    const int m = g.m(), n = g.n();
    if (m > 0) {
        const Complex theta = 1.0 / z + z;
        const Matrix b = g.block_b();
        sample.psi = (theta * Matrix::Identity(m, m) - g.block_d())
                         .partialPivLu()
                         .solve(b / z + z * b * sample.s);
    } else {
        sample.psi = Matrix::Zero(0, n);
    }
    return sample;
}

// Amplitude <vertex | sc_j(k)> of the incoming scattering state on path j
// at momentum k in (-pi, 0). On path j' at distance x the amplitude is
// z^{-x} delta_{j'j} + z^x S_{j'j}(z) with z = e^{ik}; at internal vertex
// w it is Psi(z)[w][j].
inline Complex scattering_amplitude_from_sample(const SMatrixSample& sample, int j,
                                                const Vertex& v) {
    const Complex z = sample.z;
    if (v.kind == Vertex::Kind::Path) {
        Complex amp = std::pow(z, v.x) * sample.s(v.path, j);
        if (v.path == j) amp += std::pow(z, -v.x);
        return amp;
    }
    return sample.psi(v.internal, j);
}

inline Complex scattering_amplitude(const ScatteringGraph& g, double k, int j,
                                    const Vertex& v) {
    if (!(k > -M_PI && k < 0.0)) throw DomainError("scattering_amplitude: k must be in (-pi, 0)");
    if (j < 0 || j >= g.n()) throw DomainError("scattering_amplitude: path index out of range");
    if (v.kind == Vertex::Kind::Path) {
        if (v.path < 0 || v.path >= g.n() || v.x < 1) throw DomainError("bad path vertex");
    } else if (v.internal < 0 || v.internal >= g.m()) {
        throw DomainError("bad internal vertex");
    }
    const Complex z = std::polar(1.0, k);
    return scattering_amplitude_from_sample(s_matrix(g, z), j, v);
}

// Independent oracle: assembles the candidate scattering state on the
// gadget and on path vertices x <= x_cut, applies the truncated
// Hamiltonian row by row, and returns the maximal eigenvalue-equation
// residual on rows the truncation does not bite (all gadget rows and path
// rows x <= x_cut - 1).
inline double verify_scattering_state(const ScatteringGraph& g, double k, int j,
                                      int x_cut) {
    if (x_cut < 3) throw DomainError("verify_scattering_state: x_cut must be >= 3");
    const SMatrixSample sample = s_matrix(g, std::polar(1.0, k));
    const int n = g.n(), m = g.m();
    const int sz = n + m + n * (x_cut - 1);  // gadget + path vertices x = 2..x_cut
    auto path_index = [&](int jp, int x) { return n + m + jp * (x_cut - 1) + (x - 2); };

    Vector state(sz);
    for (int jp = 0; jp < n; ++jp) {
        state(jp) = scattering_amplitude_from_sample(sample, j, Vertex::on_path(jp, 1));
    }
    for (int w = 0; w < m; ++w) state(n + w) = sample.psi(w, j);
    for (int jp = 0; jp < n; ++jp) {
        for (int x = 2; x <= x_cut; ++x) {
            state(path_index(jp, x)) =
                scattering_amplitude_from_sample(sample, j, Vertex::on_path(jp, x));
        }
    }

    Matrix h = Matrix::Zero(sz, sz);
    h.topLeftCorner(n + m, n + m) = g.hhat();
    for (int jp = 0; jp < n; ++jp) {
        int prev = jp;  // attachment vertex is (1, jp)
        for (int x = 2; x <= x_cut; ++x) {
            const int cur = path_index(jp, x);
            h(prev, cur) = 1.0;
            h(cur, prev) = 1.0;
            prev = cur;
        }
    }

    const double energy = 2.0 * std::cos(k);
    const Vector residual = h * state - energy * state;
    double worst = 0.0;
    for (int i = 0; i < n + m; ++i) worst = std::max(worst, std::abs(residual(i)));
    for (int jp = 0; jp < n; ++jp) {
        for (int x = 2; x <= x_cut - 1; ++x) {
            worst = std::max(worst, std::abs(residual(path_index(jp, x))));
        }
    }
    return worst;
}

}  // namespace gscat
