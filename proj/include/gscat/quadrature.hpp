#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gscat/errors.hpp"
#include "gscat/graph.hpp"

namespace gscat {

struct QuadratureResult {
    Matrix value;
    double error_estimate = 0.0;
    int panels = 0;
};

// Globally adaptive Simpson quadrature for matrix-valued integrands.
// The worst panel (by |S_fine - S_coarse|_max / 15) is split until the
// summed estimate meets the target. Breakpoints pre-split the domain, with
// a tiny inset so the integrand is never evaluated exactly at a singular
// abscissa.
class AdaptiveQuadrature {
  public:
    using Integrand = std::function<Matrix(double)>;

    AdaptiveQuadrature(Integrand f, double target, int max_panels = 100000)
        : f_(std::move(f)), target_(target), max_panels_(max_panels) {}

    QuadratureResult integrate(double a, double b,
                               const std::vector<double>& breakpoints = {},
                               double inset = 1e-10) const {
        std::vector<double> cuts;
        for (double bp : breakpoints) {
            if (bp > a + 10 * inset && bp < b - 10 * inset) cuts.push_back(bp);
        }
        std::sort(cuts.begin(), cuts.end());

        QuadratureResult res;
        double lo = a + inset;
        bool first = true;
        auto add_piece = [&](double x0, double x1) {
            QuadratureResult part = integrate_panelwise(x0, x1);
            if (first) {
                res.value = part.value;
                first = false;
            } else {
                res.value += part.value;
            }
            res.error_estimate += part.error_estimate;
            res.panels += part.panels;
        };
        for (double c : cuts) {
            add_piece(lo, c - inset);
            lo = c + inset;
        }
        add_piece(lo, b - inset);
        return res;
    }

  private:
    struct Panel {
        double a, b;
        Matrix fa, fm, fb;
        Matrix fine;  // two-half Simpson over [a, b]
        double error;

        bool operator<(const Panel& other) const { return error < other.error; }
    };

    static Matrix simpson(double a, double b, const Matrix& fa, const Matrix& fm,
                          const Matrix& fb) {
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    }

    Panel make_panel(double a, double b, Matrix fa, Matrix fm, Matrix fb) const {
        Panel p{a, b, std::move(fa), std::move(fm), std::move(fb), Matrix(), 0.0};
        const Matrix coarse = simpson(a, b, p.fa, p.fm, p.fb);
        const double m = 0.5 * (a + b);
        const Matrix fl = f_(0.5 * (a + m));
        const Matrix fr = f_(0.5 * (m + b));
        p.fine = simpson(a, m, p.fa, fl, p.fm) + simpson(m, b, p.fm, fr, p.fb);
        p.error = (p.fine - coarse).cwiseAbs().maxCoeff() / 15.0;
        return p;
    }

    QuadratureResult integrate_panelwise(double a, double b) const {
        std::priority_queue<Panel> queue;
        std::vector<Panel> frozen;  // panels at the width floor
        const double m = 0.5 * (a + b);
        const Matrix fa = f_(a), fm = f_(m), fb = f_(b);
        queue.push(make_panel(a, m, fa, f_(0.5 * (a + m)), fm));
        queue.push(make_panel(m, b, fm, f_(0.5 * (m + b)), fb));
        int panels = 2;
        double total_error = 0.0;
        {
            std::priority_queue<Panel> copy = queue;
            while (!copy.empty()) {
                total_error += copy.top().error;
                copy.pop();
            }
        }

        const double min_width = 1e-12 * std::max(b - a, 1.0);
        while (total_error > target_ && !queue.empty()) {
            if (panels >= max_panels_) {
                throw QuadratureStalled(
                    "adaptive quadrature: error estimate not converging near k = " +
                    std::to_string(0.5 * (queue.top().a + queue.top().b)));
            }
            Panel worst = queue.top();
            queue.pop();
            total_error -= worst.error;
            const double mid = 0.5 * (worst.a + worst.b);
            Panel halves[2] = {
                make_panel(worst.a, mid, std::move(worst.fa), f_(0.5 * (worst.a + mid)),
                           worst.fm),
                make_panel(mid, worst.b, std::move(worst.fm), f_(0.5 * (mid + worst.b)),
                           std::move(worst.fb))};
            for (Panel& h : halves) {
                total_error += h.error;
                if (h.b - h.a < min_width) {
                    frozen.push_back(std::move(h));
                } else {
                    queue.push(std::move(h));
                }
            }
            ++panels;
        }

        QuadratureResult res;
        res.panels = panels;
        bool first = true;
        auto accumulate = [&](const Panel& p) {
            if (first) {
                res.value = p.fine;
                first = false;
            } else {
                res.value += p.fine;
            }
            res.error_estimate += p.error;
        };
        while (!queue.empty()) {
            accumulate(queue.top());
            queue.pop();
        }
        for (const Panel& p : frozen) accumulate(p);
        return res;
    }

    Integrand f_;
    double target_;
    int max_panels_;
};

}  // namespace gscat
