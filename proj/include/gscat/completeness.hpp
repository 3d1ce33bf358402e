#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "gscat/quadrature.hpp"
#include "gscat/smatrix.hpp"
#include "gscat/spectra.hpp"

namespace gscat {

// Verifies that the incoming scattering states together with the bound
// states resolve the identity on a finite vertex window: all gadget
// vertices plus path vertices x <= x_cut on every path.

struct CompletenessReport {
    int x_cut = 0;
    std::vector<Vertex> window;
    double max_deviation = 0.0;
    Vertex worst_v, worst_w;
    int quad_panels = 0;
    double quad_error_estimate = 0.0;
    std::vector<double> excluded_energies;  // k with gamma(e^{ik}) singular
};

namespace detail {

inline std::vector<Vertex> completeness_window(const ScatteringGraph& g, int x_cut) {
    std::vector<Vertex> window;
    for (int w = 0; w < g.m(); ++w) window.push_back(Vertex::internal_vertex(w));
    for (int j = 0; j < g.n(); ++j) {
        for (int x = 1; x <= x_cut; ++x) window.push_back(Vertex::on_path(j, x));
    }
    return window;
}

// Momenta in (-pi, 0) where gamma(e^{ik}) is singular: the on-circle roots
// of W. These are quadrature breakpoints, not poles of the integrand.
inline std::vector<double> excluded_momenta(const ScatteringGraph& g) {
    std::vector<double> ks;
    const RootCensus census = root_census(w_polynomial(g), g.tol());
    for (const auto& root : census.roots) {
        if (root.cls == RootClass::OnCircleConjugatePair) {
            const double k = std::arg(root.value);
            if (k > -M_PI && k < 0.0) ks.push_back(k);
        }
    }
    return ks;
}

// Column j holds <v|sc_j(k)> for every window vertex v; one S-matrix
// evaluation covers the whole window. Points where gamma is singular get
// the same jitter treatment as the winding grid.
inline Matrix window_amplitudes(const SMatrixEvaluator& eval,
                                const std::vector<Vertex>& window, int n, double k) {
    double jitter = 1e-9;
    for (int attempt = 0;; ++attempt) {
        try {
            const SMatrixSample sample = eval(std::polar(1.0, k));
            Matrix a(static_cast<int>(window.size()), n);
            for (std::size_t v = 0; v < window.size(); ++v) {
                for (int j = 0; j < n; ++j) {
                    a(static_cast<int>(v), j) =
                        scattering_amplitude_from_sample(sample, j, window[v]);
                }
            }
            return a;
        } catch (const GammaSingular&) {
            if (attempt >= 8) throw;
            k += jitter;
            jitter *= 10.0;
        }
    }
}

inline Complex bound_state_amplitude_on_window(const UnconfinedState& st,
                                               const Vertex& v) {
    if (v.kind == Vertex::Kind::Internal) return st.norm_const * st.beta(v.internal);
    return st.norm_const * st.alpha(v.path) * std::pow(st.x0, v.x - 1);
}

}  // namespace detail

// Sum_j int_{-pi}^{0} dk/2pi <v|sc_j(k)><sc_j(k)|w>, by adaptive quadrature.
inline Complex scattering_overlap_integral(const ScatteringGraph& g, const Vertex& v,
                                           const Vertex& w, double quad_target = 0.0) {
    if (quad_target <= 0.0) quad_target = g.tol().quad_target;
    const SMatrixEvaluator eval(g, /*cross_check=*/false);
    const std::vector<Vertex> window = {v, w};
    auto f = [&](double k) -> Matrix {
        const Matrix a = detail::window_amplitudes(eval, window, g.n(), k);
        Matrix out(1, 1);
        out(0, 0) = (a.row(0) * a.row(1).adjoint())(0, 0) / (2.0 * M_PI);
        return out;
    };
    const auto res = AdaptiveQuadrature(f, quad_target)
                         .integrate(-M_PI, 0.0, detail::excluded_momenta(g));
    return res.value(0, 0);
}

// Max over window pairs of |scattering integral + bound-state projectors
// - identity|. Confined states live on internal vertices only; unconfined
// states carry the alpha_j x0^{x-1} tails onto the paths.
inline CompletenessReport completeness_defect(const ScatteringGraph& g, int x_cut = 6,
                                              double quad_target = 0.0) {
    if (x_cut < 2) throw DomainError("completeness_defect: x_cut must be >= 2");
    if (quad_target <= 0.0) quad_target = g.tol().quad_target;

    CompletenessReport rep;
    rep.x_cut = x_cut;
    rep.window = detail::completeness_window(g, x_cut);
    rep.excluded_energies = detail::excluded_momenta(g);
    const int nw = static_cast<int>(rep.window.size());

    const SMatrixEvaluator eval(g, /*cross_check=*/false);
    auto f = [&](double k) -> Matrix {
        const Matrix a = detail::window_amplitudes(eval, rep.window, g.n(), k);
        return (a * a.adjoint()) / (2.0 * M_PI);
    };
    const auto quad =
        AdaptiveQuadrature(f, quad_target).integrate(-M_PI, 0.0, rep.excluded_energies);
    rep.quad_panels = quad.panels;
    rep.quad_error_estimate = quad.error_estimate;

    Matrix lhs = quad.value;
    const BoundStateCatalog cat = bound_state_catalog(g);
    for (const auto& st : cat.unconfined) {
        Vector phi(nw);
        for (int v = 0; v < nw; ++v) {
            phi(v) = detail::bound_state_amplitude_on_window(st, rep.window[static_cast<std::size_t>(v)]);
        }
        lhs += phi * phi.adjoint();
    }
    for (const auto& st : cat.confined) {
        Vector psi = Vector::Zero(nw);
        for (int v = 0; v < nw; ++v) {
            const Vertex& vert = rep.window[static_cast<std::size_t>(v)];
            if (vert.kind == Vertex::Kind::Internal) psi(v) = st.beta(vert.internal);
        }
        lhs += psi * psi.adjoint();
    }

    rep.max_deviation = 0.0;
    for (int v = 0; v < nw; ++v) {
        for (int w = 0; w < nw; ++w) {
            const double dev = std::abs(lhs(v, w) - (v == w ? 1.0 : 0.0));
            if (dev > rep.max_deviation) {
                rep.max_deviation = dev;
                rep.worst_v = rep.window[static_cast<std::size_t>(v)];
                rep.worst_w = rep.window[static_cast<std::size_t>(w)];
            }
        }
    }
    return rep;
}

}  // namespace gscat
