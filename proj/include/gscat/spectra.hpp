#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "gscat/graph.hpp"
#include "gscat/smatrix.hpp"

namespace gscat {

// ---------------------------------------------------------------------------
// W(z) = det gamma(z) as a polynomial
// ---------------------------------------------------------------------------

struct WPolynomial {
    Vector coeffs;  // coeffs(i) multiplies z^i; length degree + 1
    int degree = 0;
    double trim_threshold = 0.0;  // reported so users can audit the degree call

    Complex eval(Complex z) const {
        Complex acc(0.0, 0.0);
        for (int i = degree; i >= 0; --i) acc = acc * z + coeffs(i);
        return acc;
    }

    WPolynomial derivative() const {
        WPolynomial d;
        d.degree = std::max(degree - 1, 0);
        d.coeffs = Vector::Zero(d.degree + 1);
        for (int i = 1; i <= degree; ++i) d.coeffs(i - 1) = static_cast<double>(i) * coeffs(i);
        d.trim_threshold = trim_threshold;
        return d;
    }

    // Newton iteration on p/p', which has a simple zero at every root of p
    // regardless of multiplicity. A multiple root is only determined to
    // about sqrt(machine epsilon) by its coefficients; the iteration stops
    // at that noise floor.
    Complex refine_root(Complex z0, int iterations = 12) const {
        if (degree < 1) return z0;
        const WPolynomial p1 = derivative();
        const WPolynomial p2 = p1.derivative();
        Complex z = z0;
        for (int it = 0; it < iterations; ++it) {
            const Complex p = eval(z);
            const Complex dp = p1.eval(z);
            if (dp == Complex(0.0, 0.0)) break;
            const Complex u = p / dp;
            const Complex du = 1.0 - p * p2.eval(z) / (dp * dp);
            if (du == Complex(0.0, 0.0)) break;
            const Complex step = u / du;
            z -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
        }
        return z;
    }
};

// Coefficients by evaluating det gamma at the (2m+n+1)-th roots of unity
// followed by an inverse discrete Fourier transform. Leading coefficients
// below 1e-10 * max|c| are trimmed.
inline WPolynomial w_polynomial(const ScatteringGraph& g) {
    const int max_deg = 2 * g.m() + g.n();
    const int npts = max_deg + 1;
    Vector values(npts);
    for (int t = 0; t < npts; ++t) {
        const Complex zt = std::polar(1.0, 2.0 * M_PI * t / npts);
        values(t) = Eigen::PartialPivLU<Matrix>(gamma_matrix(g, zt)).determinant();
    }
    Vector coeffs = Vector::Zero(npts);
    for (int j = 0; j < npts; ++j) {
        Complex acc(0.0, 0.0);
        for (int t = 0; t < npts; ++t) {
            acc += values(t) * std::polar(1.0, -2.0 * M_PI * j * t / npts);
        }
        coeffs(j) = acc / static_cast<double>(npts);
    }

    WPolynomial w;
    w.trim_threshold = 1e-10 * coeffs.cwiseAbs().maxCoeff();
    int deg = max_deg;
    while (deg > 0 && std::abs(coeffs(deg)) < w.trim_threshold) --deg;
    w.degree = deg;
    w.coeffs = coeffs.head(deg + 1);
    return w;
}

// ---------------------------------------------------------------------------
// Root census
// ---------------------------------------------------------------------------

enum class RootClass { InsideReal, OnCircleConjugatePair, AtPlusMinusOne, Outside };

struct RootEntry {
    Complex value;      // snapped location
    Complex raw;        // cluster centroid before snapping
    int multiplicity = 1;
    RootClass cls = RootClass::Outside;
};

struct RootCensus {
    std::vector<RootEntry> roots;
    int alpha1 = 0;  // multiplicity inside the open unit disk
    int alpha2 = 0;  // conjugate pairs on the circle away from +-1
    int alpha3 = 0;  // multiplicity at +-1
    int degree = 0;
};

namespace detail {

// Multiplicity of the root s in p, by counting successive derivatives that
// vanish relative to their own coefficient scale (|s| = 1 here, so the
// coefficient L1 norm bounds the evaluation).
inline int root_multiplicity_at(const WPolynomial& p, double s) {
    WPolynomial q = p;
    int mult = 0;
    while (mult < p.degree) {
        const double scale = q.coeffs.cwiseAbs().sum();
        if (std::abs(q.eval(Complex(s, 0.0))) > 1e-7 * std::max(scale, 1e-300)) break;
        ++mult;
        q = q.derivative();
    }
    return mult;
}

inline std::vector<Complex> companion_roots(const WPolynomial& p) {
    const int k = p.degree;
    if (k == 0) return {};
    Matrix companion = Matrix::Zero(k, k);
    for (int i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < k; ++i) companion(i, k - 1) = -p.coeffs(i) / p.coeffs(k);
    Eigen::ComplexEigenSolver<Matrix> es(companion, /*computeEigenvectors=*/false);
    std::vector<Complex> roots(es.eigenvalues().data(), es.eigenvalues().data() + k);
    return roots;
}

}  // namespace detail

// Roots via companion-matrix eigenvalues of the trimmed monic polynomial.
// Clusters are merged, refined by Newton on p/p', and snapped according to
// the root-location theorems: roots strictly inside the disk are real,
// on-circle roots are snapped to the circle and come in conjugate pairs,
// and multiplicities at +-1 are established by derivative counting.
inline RootCensus root_census(const WPolynomial& w, const ToleranceConfig& tol) {
    RootCensus census;
    census.degree = w.degree;
    if (w.degree == 0) return census;

    std::vector<Complex> raw = detail::companion_roots(w);

    // Roots at +-1 first: derivative counting is far more accurate than the
    // companion eigenvalues when the root is multiple.
    for (double s : {1.0, -1.0}) {
        const int mult = detail::root_multiplicity_at(w, s);
        if (mult == 0) continue;
        // Drop the companion eigenvalues nearest to s.
        for (int c = 0; c < mult; ++c) {
            auto it = std::min_element(raw.begin(), raw.end(), [&](Complex a, Complex b) {
                return std::abs(a - s) < std::abs(b - s);
            });
            raw.erase(it);
        }
        RootEntry entry;
        entry.value = Complex(s, 0.0);
        entry.raw = entry.value;
        entry.multiplicity = mult;
        entry.cls = RootClass::AtPlusMinusOne;
        census.roots.push_back(entry);
        census.alpha3 += mult;
    }

    // Cluster the remaining eigenvalues, refine, and re-merge. A double
    // root splits the companion eigenvalues by ~sqrt(eps), so the
    // post-refinement merge radius has a 1e-7 floor.
    const double merge_radius = std::max(tol.eps_root_cluster, 1e-7);
    struct Cluster {
        Complex centroid;
        int count = 0;
    };
    std::vector<Cluster> clusters;
    std::vector<bool> used(raw.size(), false);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (used[i]) continue;
        Complex sum = raw[i];
        int count = 1;
        used[i] = true;
        for (std::size_t j = i + 1; j < raw.size(); ++j) {
            if (!used[j] && std::abs(raw[j] - sum / static_cast<double>(count)) <= tol.eps_root_cluster) {
                sum += raw[j];
                ++count;
                used[j] = true;
            }
        }
        clusters.push_back({sum / static_cast<double>(count), count});
    }
    for (auto& c : clusters) c.centroid = w.refine_root(c.centroid);
    std::vector<Cluster> merged;
    for (const auto& c : clusters) {
        bool absorbed = false;
        for (auto& mc : merged) {
            if (std::abs(mc.centroid - c.centroid) <= merge_radius) {
                mc.centroid = (mc.centroid * static_cast<double>(mc.count) +
                               c.centroid * static_cast<double>(c.count)) /
                              static_cast<double>(mc.count + c.count);
                mc.count += c.count;
                absorbed = true;
                break;
            }
        }
        if (!absorbed) merged.push_back(c);
    }

    for (const auto& c : merged) {
        RootEntry entry;
        entry.raw = c.centroid;
        entry.multiplicity = c.count;
        const double r = std::abs(c.centroid);
        if (r < 1.0 - tol.eps_snap) {
            entry.value = Complex(c.centroid.real(), 0.0);
            entry.cls = RootClass::InsideReal;
            census.alpha1 += c.count;
        } else if (r > 1.0 + tol.eps_snap) {
            entry.value = c.centroid;
            entry.cls = RootClass::Outside;
        } else if (std::abs(c.centroid.imag()) > tol.eps_snap) {
            // Ambiguous annulus with nonzero imaginary part: on the circle,
            // since non-real roots strictly inside are excluded.
            entry.value = c.centroid / r;
            entry.cls = RootClass::OnCircleConjugatePair;
        } else if (r < 1.0) {
            entry.value = Complex(c.centroid.real(), 0.0);
            entry.cls = RootClass::InsideReal;
            census.alpha1 += c.count;
        } else {
            entry.value = Complex(c.centroid.real(), 0.0);
            entry.cls = RootClass::Outside;
        }
        census.roots.push_back(entry);
    }

    // Conjugate pairing of on-circle non-real roots.
    int on_circle = 0;
    for (const auto& e : census.roots) {
        if (e.cls != RootClass::OnCircleConjugatePair) continue;
        on_circle += e.multiplicity;
        bool paired = false;
        for (const auto& o : census.roots) {
            if (o.cls == RootClass::OnCircleConjugatePair &&
                std::abs(o.value - std::conj(e.value)) <= merge_radius &&
                o.multiplicity == e.multiplicity) {
                paired = true;
                break;
            }
        }
        if (!paired) throw Error("root_census: unpaired on-circle root");
    }
    if (on_circle % 2 != 0) throw Error("root_census: odd number of on-circle roots");
    census.alpha2 = on_circle / 2;
    return census;
}

// ---------------------------------------------------------------------------
// Confined bound states
// ---------------------------------------------------------------------------

enum class ConfinedClass { Greater, Less, Equal };  // |lambda| > 2, < 2, = 2

struct ConfinedStates {
    Matrix basis;  // (m+n) x n_c orthonormal, attachment rows identically zero
    std::vector<double> lambdas;
    std::vector<ConfinedClass> classes;
    int dim_greater = 0;
    int dim_less = 0;
    int dim_equal = 0;

    int n_c() const { return static_cast<int>(lambdas.size()); }
};

// Eigenvectors beta of D with B^dag beta = 0, extracted per eigenvalue
// cluster so that degeneracy does not split counts.
inline ConfinedStates confined_states(const ScatteringGraph& g) {
    ConfinedStates out;
    const int m = g.m(), n = g.n();
    out.basis = Matrix::Zero(n + m, 0);
    if (m == 0) return out;

    const Matrix d = g.block_d();
    const Matrix b = g.block_b();
    Eigen::SelfAdjointEigenSolver<Matrix> es(d);
    const RealVector evals = es.eigenvalues();
    const double cluster_tol = 1e-9 * std::max(1.0, evals.cwiseAbs().maxCoeff());
    const double b_scale = std::max(1.0, b.norm());

    std::vector<Vector> basis_cols;
    int i = 0;
    while (i < m) {
        int j = i;
        while (j + 1 < m && evals(j + 1) - evals(i) <= cluster_tol) ++j;
        const int dim = j - i + 1;
        const double lambda = evals.segment(i, dim).mean();
        const Matrix v = es.eigenvectors().middleCols(i, dim);
        const Matrix bv = b.adjoint() * v;  // n x dim
        Eigen::JacobiSVD<Matrix> svd(bv, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double cutoff = g.tol().eps_rank * b_scale;
        int rank = 0;
        for (int s = 0; s < sv.size(); ++s) {
            if (sv(s) > cutoff) {
                if (sv(s) < 10.0 * cutoff) {
                    throw RankAmbiguous("confined_states: singular value near the rank cutoff");
                }
                ++rank;
            } else if (sv(s) > cutoff / 10.0) {
                throw RankAmbiguous("confined_states: singular value near the rank cutoff");
            }
        }
        const int null_dim = dim - rank;
        for (int s = 0; s < null_dim; ++s) {
            const Vector beta = v * svd.matrixV().col(rank + s);
            Vector full = Vector::Zero(n + m);
            full.tail(m) = beta;
            basis_cols.push_back(full);
            out.lambdas.push_back(lambda);
            if (std::abs(lambda) > 2.0 + g.tol().eps_snap) {
                out.classes.push_back(ConfinedClass::Greater);
                ++out.dim_greater;
            } else if (std::abs(std::abs(lambda) - 2.0) <= g.tol().eps_snap) {
                out.classes.push_back(ConfinedClass::Equal);
                ++out.dim_equal;
            } else {
                out.classes.push_back(ConfinedClass::Less);
                ++out.dim_less;
            }
        }
        i = j + 1;
    }

    out.basis = Matrix::Zero(n + m, static_cast<int>(basis_cols.size()));
    for (std::size_t c = 0; c < basis_cols.size(); ++c) out.basis.col(static_cast<int>(c)) = basis_cols[c];
    return out;
}

// ---------------------------------------------------------------------------
// Bound state catalog
// ---------------------------------------------------------------------------

struct ConfinedStateEntry {
    double lambda = 0.0;  // energy
    Vector beta;          // internal amplitudes, unit norm
    ConfinedClass cls = ConfinedClass::Less;
};

struct UnconfinedState {
    double x0 = 0.0;      // decay parameter in (-1,1) \ {0}
    double energy = 0.0;  // x0 + 1/x0
    Vector alpha;         // attachment amplitudes (nonzero)
    Vector beta;          // internal amplitudes
    double norm_const = 0.0;
};

struct HalfBoundState {
    double x0 = 0.0;  // +1 or -1
    Vector alpha;
    Vector beta;
};

struct BoundStateCatalog {
    std::vector<ConfinedStateEntry> confined;
    std::vector<UnconfinedState> unconfined;
    std::vector<HalfBoundState> half_bound;
    int n_c = 0;
    int n_b = 0;
    int n_h = 0;
    int dim_c_greater = 0;
    int dim_c_less = 0;
    int dim_c_equal = 0;

    // Half-bound states count as half a bound state each.
    double bound_state_count() const { return n_c + n_b + 0.5 * n_h; }
};

namespace detail {

// Newton refinement of a real root of det gamma using the Hermitian
// eigendecomposition: the eigenvalue branch nearest zero has a simple zero
// with derivative <v| dgamma/dx |v>, so the iteration converges to machine
// precision even when the polynomial root is multiple.
inline double refine_gamma_null(const ScatteringGraph& g, double x0) {
    double x = x0;
    for (int it = 0; it < 8; ++it) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(gamma_matrix(g, Complex(x, 0.0)));
        int imin = 0;
        es.eigenvalues().cwiseAbs().minCoeff(&imin);
        const double e = es.eigenvalues()(imin);
        const Vector v = es.eigenvectors().col(imin);
        const double slope = (v.adjoint() * d_gamma_dx(g, x) * v)(0, 0).real();
        if (slope == 0.0) break;
        const double step = e / slope;
        x -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
    }
    return x;
}

struct NullSplit {
    Matrix unconfined;  // columns with attachment support
    Matrix confined;    // columns annihilated by the attachment projector
};

// Orthonormal null space of the Hermitian matrix gamma(x0), split into the
// part with attachment support and the part without.
inline NullSplit gamma_null_split(const ScatteringGraph& g, double x0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(gamma_matrix(g, Complex(x0, 0.0)));
    const RealVector evals = es.eigenvalues();
    const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
    const double cutoff = g.tol().eps_rank * scale;
    std::vector<int> null_idx;
    for (int i = 0; i < evals.size(); ++i) {
        const double a = std::abs(evals(i));
        if (a <= cutoff) {
            null_idx.push_back(i);
        } else if (a < 10.0 * cutoff) {
            throw RankAmbiguous("bound_state_catalog: gamma eigenvalue near the null cutoff");
        }
    }
    const int dim = static_cast<int>(null_idx.size());
    Matrix null_basis(g.size(), dim);
    for (int c = 0; c < dim; ++c) null_basis.col(c) = es.eigenvectors().col(null_idx[c]);

    NullSplit split;
    if (dim == 0) {
        split.unconfined = Matrix::Zero(g.size(), 0);
        split.confined = Matrix::Zero(g.size(), 0);
        return split;
    }
    const Matrix top = null_basis.topRows(g.n());  // attachment components
    Eigen::JacobiSVD<Matrix> svd(top, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double p_cutoff = g.tol().eps_rank;  // columns are unit vectors
    int rank = 0;
    for (int s = 0; s < sv.size(); ++s) {
        if (sv(s) > p_cutoff) {
            if (sv(s) < 10.0 * p_cutoff) {
                throw RankAmbiguous("bound_state_catalog: attachment support near cutoff");
            }
            ++rank;
        } else if (sv(s) > p_cutoff / 10.0) {
            throw RankAmbiguous("bound_state_catalog: attachment support near cutoff");
        }
    }
    const Matrix rotated = null_basis * svd.matrixV();
    split.unconfined = rotated.leftCols(rank);
    split.confined = rotated.rightCols(dim - rank);
    return split;
}

}  // namespace detail

// Full census of bound phenomena: confined states from the (D, B) null
// structure; unconfined and half-bound states from the null spaces of
// gamma at the real roots of W.
inline BoundStateCatalog bound_state_catalog(const ScatteringGraph& g) {
    BoundStateCatalog cat;
    const ConfinedStates conf = confined_states(g);
    for (int c = 0; c < conf.n_c(); ++c) {
        ConfinedStateEntry entry;
        entry.lambda = conf.lambdas[static_cast<std::size_t>(c)];
        entry.beta = conf.basis.col(c).tail(g.m());
        entry.cls = conf.classes[static_cast<std::size_t>(c)];
        cat.confined.push_back(entry);
    }
    cat.n_c = conf.n_c();
    cat.dim_c_greater = conf.dim_greater;
    cat.dim_c_less = conf.dim_less;
    cat.dim_c_equal = conf.dim_equal;

    const WPolynomial w = w_polynomial(g);
    const RootCensus census = root_census(w, g.tol());
    for (const auto& root : census.roots) {
        if (root.cls == RootClass::InsideReal) {
            const double x0 = detail::refine_gamma_null(g, root.value.real());
            const auto split = detail::gamma_null_split(g, x0);
            for (int c = 0; c < split.unconfined.cols(); ++c) {
                UnconfinedState st;
                st.x0 = x0;
                st.energy = x0 + 1.0 / x0;
                st.alpha = split.unconfined.col(c).head(g.n());
                st.beta = split.unconfined.col(c).tail(g.m());
                st.norm_const = 1.0 / std::sqrt(st.alpha.squaredNorm() / (1.0 - x0 * x0) +
                                                st.beta.squaredNorm());
                cat.unconfined.push_back(st);
                ++cat.n_b;
            }
        } else if (root.cls == RootClass::AtPlusMinusOne) {
            const double x0 = root.value.real();
            const auto split = detail::gamma_null_split(g, x0);
            for (int c = 0; c < split.unconfined.cols(); ++c) {
                HalfBoundState st;
                st.x0 = x0;
                st.alpha = split.unconfined.col(c).head(g.n());
                st.beta = split.unconfined.col(c).tail(g.m());
                cat.half_bound.push_back(st);
                ++cat.n_h;
            }
        }
    }
    return cat;
}

// ---------------------------------------------------------------------------
// Count identities between root classes and bound-state counts
// ---------------------------------------------------------------------------

struct CountIdentityReport {
    int alpha1 = 0, alpha2 = 0, alpha3 = 0;
    int n_b = 0, n_h = 0;
    int dim_c_greater = 0, dim_c_less = 0, dim_c_equal = 0;
    double alpha_side = 0.0;  // alpha1 + alpha2 + alpha3/2
    double state_side = 0.0;  // n_b + n_c + n_h/2
    bool pass = false;
};

// Checks alpha1 = n_b + dim C_>, alpha2 = dim C_<, alpha3 = n_h + 2 dim C_=
// as exact integer equalities. The two sides come from independent
// pipelines: the alphas from the polynomial root census, the state counts
// from null spaces.
inline CountIdentityReport count_identity_check(const ScatteringGraph& g) {
    CountIdentityReport rep;
    const RootCensus census = root_census(w_polynomial(g), g.tol());
    const BoundStateCatalog cat = bound_state_catalog(g);
    rep.alpha1 = census.alpha1;
    rep.alpha2 = census.alpha2;
    rep.alpha3 = census.alpha3;
    rep.n_b = cat.n_b;
    rep.n_h = cat.n_h;
    rep.dim_c_greater = cat.dim_c_greater;
    rep.dim_c_less = cat.dim_c_less;
    rep.dim_c_equal = cat.dim_c_equal;
    rep.alpha_side = rep.alpha1 + rep.alpha2 + 0.5 * rep.alpha3;
    rep.state_side = cat.bound_state_count();
    rep.pass = (rep.alpha1 == cat.n_b + cat.dim_c_greater) &&
               (rep.alpha2 == cat.dim_c_less) &&
               (rep.alpha3 == cat.n_h + 2 * cat.dim_c_equal) &&
               (rep.alpha_side == rep.state_side);
    return rep;
}

// ---------------------------------------------------------------------------
// Smooth eigenbranches of gamma(x) on the real axis
// ---------------------------------------------------------------------------

struct EigenbranchTable {
    RealVector grid;          // increasing samples over [-1-delta, 1+delta]
    RealMatrix energies;      // branch x sample
    std::vector<Matrix> vectors;  // per sample: (m+n) x branches, full space
    Matrix deflation;         // orthonormal complement of the confined space
    Matrix confined_basis;
    std::vector<double> confined_lambdas;

    int branches() const { return static_cast<int>(energies.rows()); }
};

namespace detail {

inline Matrix confined_complement(const ScatteringGraph& g, const ConfinedStates& conf) {
    const int sz = g.size();
    const int nc = conf.n_c();
    if (nc == 0) return Matrix::Identity(sz, sz);
    Eigen::HouseholderQR<Matrix> qr(conf.basis);
    Matrix full = qr.householderQ() * Matrix::Identity(sz, sz);
    return full.rightCols(sz - nc);
}

}  // namespace detail

// Confined directions are deflated first; the remaining gamma(x) is
// diagonalized at each grid point and branches are matched greedily by
// maximal eigenvector overlap between adjacent samples.
inline EigenbranchTable eigenbranches(const ScatteringGraph& g, int grid_size = 201,
                                      double delta = 0.1) {
    if (grid_size < 16) throw DomainError("eigenbranches: grid_size must be >= 16");
    EigenbranchTable table;
    const ConfinedStates conf = confined_states(g);
    table.confined_basis = conf.basis;
    table.confined_lambdas = conf.lambdas;
    table.deflation = detail::confined_complement(g, conf);
    const Matrix& u = table.deflation;
    const int nb = static_cast<int>(u.cols());

    table.grid = RealVector::LinSpaced(grid_size, -1.0 - delta, 1.0 + delta);
    // gamma(0) = -I exactly: every branch is degenerate there and the
    // eigenvector basis is arbitrary, which wrecks overlap matching. Keep
    // the origin out of the sample set; branches are smooth across it.
    const double spacing = table.grid(1) - table.grid(0);
    for (int t = 0; t < grid_size; ++t) {
        if (std::abs(table.grid(t)) < 1e-9) table.grid(t) += 0.5 * spacing;
    }
    table.energies = RealMatrix::Zero(nb, grid_size);
    table.vectors.resize(static_cast<std::size_t>(grid_size));

    Matrix prev;  // previous sample's vectors in deflated coordinates
    for (int t = 0; t < grid_size; ++t) {
        const double x = table.grid(t);
        Eigen::SelfAdjointEigenSolver<Matrix> es(
            (u.adjoint() * gamma_matrix(g, Complex(x, 0.0)) * u).eval());
        Matrix vecs = es.eigenvectors();
        RealVector evals = es.eigenvalues();
        if (t > 0) {
            // Greedy assignment by maximal overlap with the previous sample.
            const RealMatrix overlap = (prev.adjoint() * vecs).cwiseAbs();
            std::vector<int> perm(static_cast<std::size_t>(nb), -1);
            std::vector<bool> row_used(static_cast<std::size_t>(nb), false);
            std::vector<bool> col_used(static_cast<std::size_t>(nb), false);
            for (int pick = 0; pick < nb; ++pick) {
                double best = -1.0;
                int bi = -1, bj = -1;
                for (int i = 0; i < nb; ++i) {
                    if (row_used[static_cast<std::size_t>(i)]) continue;
                    for (int jj = 0; jj < nb; ++jj) {
                        if (col_used[static_cast<std::size_t>(jj)]) continue;
                        if (overlap(i, jj) > best) {
                            best = overlap(i, jj);
                            bi = i;
                            bj = jj;
                        }
                    }
                }
                if (best < 0.7) {
                    throw MatchingAmbiguous("eigenbranches: branch overlap below 0.7; refine the grid");
                }
                perm[static_cast<std::size_t>(bi)] = bj;
                row_used[static_cast<std::size_t>(bi)] = true;
                col_used[static_cast<std::size_t>(bj)] = true;
            }
            Matrix matched(nb, nb);
            RealVector matched_evals(nb);
            for (int i = 0; i < nb; ++i) {
                const int jj = perm[static_cast<std::size_t>(i)];
                Complex phase = (prev.col(i).adjoint() * vecs.col(jj))(0, 0);
                if (std::abs(phase) > 0.0) phase /= std::abs(phase);
                matched.col(i) = vecs.col(jj) / phase;
                matched_evals(i) = evals(jj);
            }
            vecs = matched;
            evals = matched_evals;
        }
        prev = vecs;
        table.energies.col(t) = evals;
        table.vectors[static_cast<std::size_t>(t)] = u * vecs;
    }
    return table;
}

struct BranchCrossing {
    int branch = 0;
    double x0 = 0.0;
};

namespace detail {

// Eigenpair of the deflated gamma(x) continuing the given branch, matched
// by overlap with the branch vector at the nearest grid sample.
inline std::pair<double, Vector> branch_eval(const ScatteringGraph& g,
                                             const EigenbranchTable& table, int branch,
                                             double x) {
    const Matrix& u = table.deflation;
    Eigen::SelfAdjointEigenSolver<Matrix> es(
        (u.adjoint() * gamma_matrix(g, Complex(x, 0.0)) * u).eval());
    int nearest = 0;
    (table.grid.array() - x).abs().minCoeff(&nearest);
    const Vector ref = table.vectors[static_cast<std::size_t>(nearest)].col(branch);
    const Vector ref_defl = u.adjoint() * ref;
    int best = 0;
    double best_overlap = -1.0;
    for (int i = 0; i < es.eigenvectors().cols(); ++i) {
        const double ov = std::abs((ref_defl.adjoint() * es.eigenvectors().col(i))(0, 0));
        if (ov > best_overlap) {
            best_overlap = ov;
            best = i;
        }
    }
    return {es.eigenvalues()(best), u * es.eigenvectors().col(best)};
}

}  // namespace detail

// Sign changes of each branch across the grid, refined by bisection.
inline std::vector<BranchCrossing> find_crossings(const ScatteringGraph& g,
                                                  const EigenbranchTable& table) {
    std::vector<BranchCrossing> crossings;
    for (int b = 0; b < table.branches(); ++b) {
        for (int t = 0; t + 1 < table.grid.size(); ++t) {
            const double e0 = table.energies(b, t);
            const double e1 = table.energies(b, t + 1);
            if (e0 == 0.0) {
                crossings.push_back({b, table.grid(t)});
                continue;
            }
            if (e0 * e1 >= 0.0) continue;
            double lo = table.grid(t), hi = table.grid(t + 1);
            double flo = e0;
            for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = detail::branch_eval(g, table, b, mid).first;
                if ((fm > 0.0) == (flo > 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            crossings.push_back({b, 0.5 * (lo + hi)});
        }
    }
    return crossings;
}

struct DerivativeReport {
    int branch = 0;
    double x0 = 0.0;
    double analytic = 0.0;
    double finite_difference = 0.0;
    bool pass = false;
};

// Compares the closed-form branch derivative at a zero crossing,
// de/dx = (1/x0 - x0) + x0 <v|P_n|v>, with a central finite difference.
// Inside (-1,1) the derivative must also be nonzero with the sign of x0.
inline DerivativeReport derivative_check(const ScatteringGraph& g,
                                         const EigenbranchTable& table,
                                         const BranchCrossing& crossing) {
    DerivativeReport rep;
    rep.branch = crossing.branch;

    // Polish the crossing with Newton steps driven by the Hellmann-Feynman
    // derivative <v| dgamma/dx |v>.
    double x0 = crossing.x0;
    for (int it = 0; it < 40; ++it) {
        const auto [e, v] = detail::branch_eval(g, table, crossing.branch, x0);
        const double slope = (v.adjoint() * d_gamma_dx(g, x0) * v)(0, 0).real();
        if (slope == 0.0) break;
        const double step = e / slope;
        x0 -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(x0))) break;
    }
    const auto [e0, v0] = detail::branch_eval(g, table, crossing.branch, x0);
    if (std::abs(e0) > 1e-8) {
        throw NoCrossing("derivative_check: branch eigenvalue does not vanish at x0");
    }
    rep.x0 = x0;

    const double pn_weight = v0.head(g.n()).squaredNorm() / v0.squaredNorm();
    rep.analytic = (1.0 / x0 - x0) + x0 * pn_weight;

    const double h = 1e-5;
    const double ep = detail::branch_eval(g, table, crossing.branch, x0 + h).first;
    const double em = detail::branch_eval(g, table, crossing.branch, x0 - h).first;
    rep.finite_difference = (ep - em) / (2.0 * h);

    rep.pass = std::abs(rep.analytic - rep.finite_difference) <=
               1e-6 * (1.0 + std::abs(rep.analytic));
    if (rep.analytic == 0.0) rep.pass = false;
    if (std::abs(x0) < 1.0 - g.tol().eps_snap && x0 != 0.0) {
        if ((rep.analytic > 0.0) != (x0 > 0.0)) rep.pass = false;
    }
    return rep;
}

}  // namespace gscat
