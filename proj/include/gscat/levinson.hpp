#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "gscat/smatrix.hpp"
#include "gscat/spectra.hpp"

namespace gscat {

struct LevinsonReport {
    int winding_phase = 0;        // adaptive phase tracking around the circle
    int winding_closed_form = 0;  // 2m - 2a1 - 2a2 - a3 from the root census
    double rhs = 0.0;             // 2(m - n_b - n_c - n_h/2), an integer
    bool pass = false;
    int samples_used = 0;
    int refinement_depth = 0;
};

namespace detail {

// arg det S(e^{ik}); points that land on a root of W are jittered until
// gamma is invertible. det S is regular on the whole circle, so a nearby
// evaluation always exists.
// The jitter must be able to clear the ill-conditioned zone of a multiple
// root of W (radius ~1e-3 for a double root), hence the generous try count.
inline double arg_det_s(const SMatrixEvaluator& eval, double k, int max_tries = 8) {
    double jitter = 1e-9;
    for (int attempt = 0;; ++attempt) {
        try {
            return std::arg(eval(std::polar(1.0, k)).det_s);
        } catch (const GammaSingular&) {
            if (attempt >= max_tries) throw;
            k += jitter;
            jitter *= 10.0;
        }
    }
}

inline double wrap_phase(double d) {
    while (d > M_PI) d -= 2.0 * M_PI;
    while (d <= -M_PI) d += 2.0 * M_PI;
    return d;
}

// A root of W at distance d from the unit circle makes arg det S swing by
// a full turn within a momentum window of width ~d. When d is below the
// grid spacing the uniform grid aliases the swing away entirely (the
// endpoints agree, so bisection never triggers). Sampling hints packed
// around the root angles at offsets scaled by d make the swing visible;
// only root *locations* enter here, never their classification, so the
// phase pipeline stays an independent check on the census counts.
inline std::vector<double> near_circle_sampling_hints(const ScatteringGraph& g) {
    std::vector<double> hints;
    const WPolynomial w = w_polynomial(g);
    for (const Complex& root : companion_roots(w)) {
        const double dist = std::abs(std::abs(root) - 1.0);
        if (dist > 0.1) continue;
        const double theta = std::arg(root);
        const double d = std::max(dist, 1e-9);
        for (double t : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
            for (double sgn : {1.0, -1.0}) {
                const double k = theta + sgn * std::min(t * d, 0.05);
                if (k > -M_PI && k < M_PI) hints.push_back(k);
                if (t == 0.0) break;
            }
        }
    }
    return hints;
}

}  // namespace detail

struct PhaseWindingResult {
    int winding = 0;
    int samples_used = 0;
    int refinement_depth = 0;
    std::vector<std::pair<double, double>> trace;  // (k, unwrapped phase)
};

// Unwraps arg det S over one positively-oriented traversal k in [-pi, pi].
// Adjacent steps must stay below pi/2; offending intervals are bisected up
// to max_refine levels. The total phase change divided by 2*pi must land
// on an integer within 0.01.
inline PhaseWindingResult winding_by_phase_traced(const ScatteringGraph& g,
                                                  int initial_grid = 256,
                                                  int max_refine = 30) {
    if (initial_grid < 64) throw DomainError("winding_by_phase: initial_grid must be >= 64");
    const SMatrixEvaluator eval(g, /*cross_check=*/false);

    PhaseWindingResult res;
    double total = 0.0;

    struct Segment {
        double k0, a0, k1, a1;
        int depth;
    };
    std::vector<Segment> stack;
    std::vector<double> ks(static_cast<std::size_t>(initial_grid) + 1);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        ks[i] = -M_PI + 2.0 * M_PI * static_cast<double>(i) / initial_grid;
    }
    for (double hint : detail::near_circle_sampling_hints(g)) ks.push_back(hint);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-13; }),
             ks.end());
    std::vector<double> args(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        args[i] = detail::arg_det_s(eval, ks[i]);
        ++res.samples_used;
    }
    res.trace.emplace_back(ks[0], 0.0);
    for (std::size_t i = ks.size(); i-- > 1;) {
        stack.push_back({ks[i - 1], args[i - 1], ks[i], args[i], 0});
    }
    while (!stack.empty()) {
        const Segment seg = stack.back();
        stack.pop_back();
        const double d = detail::wrap_phase(seg.a1 - seg.a0);
        if (std::abs(d) < M_PI / 2.0) {
            total += d;
            res.trace.emplace_back(seg.k1, total);
            continue;
        }
        if (seg.depth >= max_refine) {
            throw RefinementExhausted("winding_by_phase: phase step >= pi/2 at maximum depth");
        }
        const double km = 0.5 * (seg.k0 + seg.k1);
        const double am = detail::arg_det_s(eval, km);
        ++res.samples_used;
        res.refinement_depth = std::max(res.refinement_depth, seg.depth + 1);
        stack.push_back({km, am, seg.k1, seg.a1, seg.depth + 1});
        stack.push_back({seg.k0, seg.a0, km, am, seg.depth + 1});
    }

    const double turns = total / (2.0 * M_PI);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 0.01) {
        throw NotInteger("winding_by_phase: accumulated phase is not an integer number of turns");
    }
    res.winding = static_cast<int>(rounded);
    return res;
}

inline int winding_by_phase(const ScatteringGraph& g, int initial_grid = 256,
                            int max_refine = 30) {
    return winding_by_phase_traced(g, initial_grid, max_refine).winding;
}

inline int winding_closed_form_from_census(const ScatteringGraph& g,
                                           const RootCensus& census) {
    return 2 * g.m() - 2 * census.alpha1 - 2 * census.alpha2 - census.alpha3;
}

inline int winding_closed_form(const ScatteringGraph& g) {
    return winding_closed_form_from_census(g, root_census(w_polynomial(g), g.tol()));
}

// Levinson's theorem: both winding pipelines must equal
// 2(m - n_b - n_c - n_h/2) exactly. The phase side touches only S
// evaluations; the closed-form side only the roots of W.
inline LevinsonReport levinson_check(const ScatteringGraph& g) {
    LevinsonReport rep;
    const PhaseWindingResult phase = winding_by_phase_traced(g);
    rep.winding_phase = phase.winding;
    rep.samples_used = phase.samples_used;
    rep.refinement_depth = phase.refinement_depth;
    rep.winding_closed_form = winding_closed_form(g);
    const BoundStateCatalog cat = bound_state_catalog(g);
    rep.rhs = 2.0 * (g.m() - cat.n_b - cat.n_c - 0.5 * cat.n_h);
    rep.pass = (rep.winding_phase == rep.winding_closed_form) &&
               (static_cast<double>(rep.winding_phase) == rep.rhs);
    return rep;
}

}  // namespace gscat
