#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "hbem/geometry.hpp"
#include "hbem/kernels.hpp"
#include "hbem/medium.hpp"
#include "hbem/types.hpp"

namespace hbem {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre on [-1, 1], 1 <= n <= 32. Rules are built once and cached.
const QuadratureRule& gauss_rule(int n);

/// Gauss-Lobatto on [-1, 1] including both endpoints, 3 <= n <= 13.
const QuadratureRule& lobatto_rule(int n);

struct AdaptiveBudget {
    double rel_tol = 1e-8;
    double abs_tol = 0.0;  // 0: floor of 1e-14 (scale + 1)
    int max_depth = 12;
};

struct AdaptiveStats {
    std::size_t cells_used = 0;
    std::size_t evaluations = 0;
    int depth_reached = 0;
    bool converged = true;

    void merge(const AdaptiveStats& o) {
        cells_used += o.cells_used;
        evaluations += o.evaluations;
        depth_reached = std::max(depth_reached, o.depth_reached);
        converged = converged && o.converged;
    }
};

inline constexpr int adaptive_points = 7;

template <std::size_t N>
using CVals = std::array<cplx, N>;

namespace detail {

template <std::size_t N>
CVals<N>& accumulate(CVals<N>& a, const CVals<N>& b) {
    for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
    return a;
}

template <std::size_t N>
struct Tolerance {
    std::array<int, N> group{};
    std::array<double, N> limit{};

    Tolerance(const std::array<int, N>& g, const CVals<N>& a, const CVals<N>& b, const AdaptiveBudget& budget)
        : group(g) {
        std::array<double, N> scale{};
        for (std::size_t i = 0; i < N; ++i) {
            const double s = std::max(std::abs(a[i]), std::abs(b[i]));
            for (std::size_t j = 0; j < N; ++j) {
                if (group[j] == group[i]) scale[j] = std::max(scale[j], s);
            }
        }
        for (std::size_t i = 0; i < N; ++i) {
            const double floor = budget.abs_tol > 0.0 ? budget.abs_tol : 1e-14 * (scale[i] + 1.0);
            limit[i] = std::max(budget.rel_tol * scale[i], floor);
        }
    }

    bool accepts(const CVals<N>& coarse, const CVals<N>& fine) const {
        for (std::size_t i = 0; i < N; ++i) {
            if (!(std::abs(fine[i] - coarse[i]) <= limit[i])) return false;
        }
        return true;
    }
};

template <std::size_t N, class F>
CVals<N> lobatto_cell_2d(F& f, double t0, double t1, double s0, double s1, AdaptiveStats& st) {
    const QuadratureRule& r = lobatto_rule(adaptive_points);
    const double ht = 0.5 * (t1 - t0);
    const double hs = 0.5 * (s1 - s0);
    const double ct = 0.5 * (t1 + t0);
    const double cs = 0.5 * (s1 + s0);
    CVals<N> acc{};
    for (int i = 0; i < adaptive_points; ++i) {
        const double t = ct + ht * r.nodes[i];
        for (int j = 0; j < adaptive_points; ++j) {
            const double w = r.weights[i] * r.weights[j];
            const CVals<N> v = f(t, cs + hs * r.nodes[j]);
            for (std::size_t k = 0; k < N; ++k) acc[k] += w * v[k];
        }
    }
    st.evaluations += adaptive_points * adaptive_points;
    for (auto& a : acc) a *= ht * hs;
    return acc;
}

using Cell2 = std::array<double, 4>;  // t0, t1, s0, s1

inline std::array<Cell2, 4> split(const Cell2& c) {
    const double tm = 0.5 * (c[0] + c[1]);
    const double sm = 0.5 * (c[2] + c[3]);
    return {{{c[0], tm, c[2], sm}, {tm, c[1], c[2], sm}, {c[0], tm, sm, c[3]}, {tm, c[1], sm, c[3]}}};
}

template <std::size_t N, class F>
std::array<CVals<N>, 4> children_2d(F& f, const Cell2& c, AdaptiveStats& st) {
    const auto cells = split(c);
    std::array<CVals<N>, 4> out;
    for (int k = 0; k < 4; ++k) out[k] = lobatto_cell_2d<N>(f, cells[k][0], cells[k][1], cells[k][2], cells[k][3], st);
    return out;
}

template <std::size_t N, class F>
CVals<N> refine_2d(F& f, const Tolerance<N>& tol, const AdaptiveBudget& budget, AdaptiveStats& st, const Cell2& cell,
                   const CVals<N>& parent, const std::array<CVals<N>, 4>& child, int depth) {
    CVals<N> sum{};
    for (const auto& c : child) accumulate(sum, c);
    st.depth_reached = std::max(st.depth_reached, depth + 1);
    if (tol.accepts(parent, sum)) {
        ++st.cells_used;
        return sum;
    }
    if (depth + 1 >= budget.max_depth) {
        ++st.cells_used;
        st.converged = false;
        return sum;
    }
    const auto cells = split(cell);
    CVals<N> out{};
    for (int k = 0; k < 4; ++k) {
        const auto grand = children_2d<N>(f, cells[k], st);
        accumulate(out, refine_2d<N>(f, tol, budget, st, cells[k], child[k], grand, depth + 1));
    }
    return out;
}

template <std::size_t N, class F>
CVals<N> lobatto_cell_1d(F& f, double a, double b, AdaptiveStats& st) {
    const QuadratureRule& r = lobatto_rule(adaptive_points);
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (b + a);
    CVals<N> acc{};
    for (int i = 0; i < adaptive_points; ++i) {
        const CVals<N> v = f(c + h * r.nodes[i]);
        for (std::size_t k = 0; k < N; ++k) acc[k] += r.weights[i] * v[k];
    }
    st.evaluations += adaptive_points;
    for (auto& x : acc) x *= h;
    return acc;
}

template <std::size_t N, class F>
CVals<N> refine_1d(F& f, const Tolerance<N>& tol, const AdaptiveBudget& budget, AdaptiveStats& st, double a,
                   double b, const CVals<N>& parent, const CVals<N>& left, const CVals<N>& right, int depth) {
    CVals<N> sum = left;
    accumulate(sum, right);
    st.depth_reached = std::max(st.depth_reached, depth + 1);
    if (tol.accepts(parent, sum)) {
        ++st.cells_used;
        return sum;
    }
    if (depth + 1 >= budget.max_depth) {
        ++st.cells_used;
        st.converged = false;
        return sum;
    }
    const double m = 0.5 * (a + b);
    const double q1 = 0.5 * (a + m);
    const double q3 = 0.5 * (m + b);
    CVals<N> out = refine_1d<N>(f, tol, budget, st, a, m, left, lobatto_cell_1d<N>(f, a, q1, st),
                                lobatto_cell_1d<N>(f, q1, m, st), depth + 1);
    accumulate(out, refine_1d<N>(f, tol, budget, st, m, b, right, lobatto_cell_1d<N>(f, m, q3, st),
                                 lobatto_cell_1d<N>(f, q3, b, st), depth + 1));
    return out;
}

}  // namespace detail

/// Quadtree Lobatto integration of a vector-valued f(t, s) over [-1, 1]^2.
/// A cell is accepted when its four children agree with it componentwise to
/// rel_tol times the magnitude of the whole-domain estimate; components that
/// share a group id share that magnitude.
template <std::size_t N, class F>
CVals<N> adaptive_lobatto_2d(F&& f, const AdaptiveBudget& budget, AdaptiveStats& st,
                             const std::array<int, N>& group = {}) {
    const detail::Cell2 whole{-1.0, 1.0, -1.0, 1.0};
    const CVals<N> root = detail::lobatto_cell_2d<N>(f, -1.0, 1.0, -1.0, 1.0, st);
    const auto child = detail::children_2d<N>(f, whole, st);
    CVals<N> probe{};
    for (const auto& c : child) detail::accumulate(probe, c);
    // The scale comes from the root and its children together; a single
    // 7x7 sample can miss a narrow ridge entirely.
    const detail::Tolerance<N> tol(group, root, probe, budget);
    if (budget.max_depth <= 0) {
        ++st.cells_used;
        st.converged = tol.accepts(root, probe);
        return probe;
    }
    return detail::refine_2d<N>(f, tol, budget, st, whole, root, child, 0);
}

/// Scalar convenience overload.
template <class F>
cplx adaptive_lobatto_2d_scalar(F&& f, const AdaptiveBudget& budget, AdaptiveStats& st) {
    auto g = [&](double t, double s) { return CVals<1>{f(t, s)}; };
    return adaptive_lobatto_2d<1>(g, budget, st)[0];
}

/// Binary-tree Lobatto integration of a vector-valued f(t) over [a, b].
template <std::size_t N, class F>
CVals<N> adaptive_lobatto_1d(F&& f, double a, double b, const AdaptiveBudget& budget, AdaptiveStats& st,
                             const std::array<int, N>& group = {}) {
    const CVals<N> root = detail::lobatto_cell_1d<N>(f, a, b, st);
    const double m = 0.5 * (a + b);
    const CVals<N> left = detail::lobatto_cell_1d<N>(f, a, m, st);
    const CVals<N> right = detail::lobatto_cell_1d<N>(f, m, b, st);
    CVals<N> probe = left;
    detail::accumulate(probe, right);
    const detail::Tolerance<N> tol(group, root, probe, budget);
    if (budget.max_depth <= 0) {
        ++st.cells_used;
        st.converged = tol.accepts(root, probe);
        return probe;
    }
    return detail::refine_1d<N>(f, tol, budget, st, a, b, root, left, right, 0);
}

/// Cone-proximity test for one medium: does E_m - E_n come within tau of the
/// cone boundary lines? Samples a 5x5 grid of differences (endpoints
/// included) and also reports a sign change across a line, which means the
/// line crosses the sampled set.
bool near_cone(const ElementFrame& em, const ElementFrame& en, const ConeData& cone, double tau);

/// Union over both media plus adjacency and coincidence.
bool needs_adaptive(const Mesh& mesh, std::size_t m, std::size_t n, const MaterialPair& mat1,
                    const MaterialPair& mat2, double tau);

/// Gauss order that integrates a Helmholtz kernel from x along element e to
/// about `tol` relative accuracy. The order follows from the Bernstein
/// ellipse through the nearest complex zero of r~^2(x - y(s)), where the
/// kernel has its branch point. Returns no_smooth_order when that zero
/// sits on or next to the element.
inline constexpr int no_smooth_order = 1000;
int smooth_gauss_order(const ElementFrame& e, Vec2 x, const MaterialPair& mat, double k0, double tol);

/// Elements m and n share a node (or are equal).
bool elements_touch(const Mesh& mesh, std::size_t m, std::size_t n);

enum class LocalBasis { constant, p1_start, p1_end };
enum class KernelKind { single_layer, double_layer };

/// Same-element Galerkin integral of the kernel against local basis
/// functions, int_E int_E k(x, y) b_m(x) b_n(y) ds_y ds_x. The logarithmic
/// part is integrated in closed form; the remainder by Gauss in the
/// difference variable.
cplx singular_pair_integral(const ElementFrame& e, LocalBasis basis_m, LocalBasis basis_n, const KernelContext& ctx,
                            KernelKind kind);

/// All same-element single-layer integrals at once: [0] constant x constant,
/// then p1[i][k] for test half i and trial half k (0 start, 1 end).
struct CoincidentSingleLayer {
    cplx constant;
    cplx p1[2][2];
};

CoincidentSingleLayer coincident_single_layer(const ElementFrame& e, const KernelContext& ctx);

/// int_{-1}^{1} int_{-1}^{1} ln|t - s| p(t) q(s) dt ds for affine p, q given by
/// (value at 0, slope).
double log_moment(double p0, double p1, double q0, double q1);

/// Optional per-pair cost record for profiling.
struct QuadratureRecord {
    std::size_t m;
    std::size_t n;
    int medium;
    std::size_t cells_used;
    bool converged;
};

void write_quadrature_csv(std::ostream& os, const std::vector<QuadratureRecord>& records);

}  // namespace hbem
