#include "hbem/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "hbem/io.hpp"
#include "hbem/specfun.hpp"

namespace hbem {

namespace {

constexpr int max_gauss = 32;
constexpr int min_lobatto = 3;
constexpr int max_lobatto = 13;

QuadratureRule build_gauss(int n) {
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node for the weight.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        r.nodes[n / 2] = 0.0;
    }
    return r;
}

QuadratureRule build_lobatto(int n) {
    // Newton on (1 - x^2) P'_{N}(x) with N = n - 1, Chebyshev-Lobatto start.
    const int N = n - 1;
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = -std::cos(pi * i / N);
        double pn = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= N; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pn = p1;
            if (i == 0 || i == N) break;
            const double dx = (x * p1 - p0) / (n * p1);
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.nodes[i] = x;
        r.weights[i] = 2.0 / (N * n * pn * pn);
    }
    for (int i = 0; i < n / 2; ++i) {
        const double x = 0.5 * (r.nodes[n - 1 - i] - r.nodes[i]);
        const double w = 0.5 * (r.weights[i] + r.weights[n - 1 - i]);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        r.nodes[n / 2] = 0.0;
    }
    return r;
}

}  // namespace

const QuadratureRule& gauss_rule(int n) {
    if (n < 1 || n > max_gauss) {
        throw std::invalid_argument("gauss_rule: order must lie in [1, 32]");
    }
    static const std::array<QuadratureRule, max_gauss + 1> rules = [] {
        std::array<QuadratureRule, max_gauss + 1> r;
        for (int k = 1; k <= max_gauss; ++k) r[k] = build_gauss(k);
        return r;
    }();
    return rules[n];
}

const QuadratureRule& lobatto_rule(int n) {
    if (n < min_lobatto || n > max_lobatto) {
        throw std::invalid_argument("lobatto_rule: order must lie in [3, 13]");
    }
    static const std::array<QuadratureRule, max_lobatto + 1> rules = [] {
        std::array<QuadratureRule, max_lobatto + 1> r;
        for (int k = min_lobatto; k <= max_lobatto; ++k) r[k] = build_lobatto(k);
        return r;
    }();
    return rules[n];
}

bool near_cone(const ElementFrame& em, const ElementFrame& en, const ConeData& cone, double tau) {
    if (!cone.hyperbolic) {
        return false;
    }
    const double scale = std::sqrt(1.0 + cone.slope * cone.slope);
    bool pos[2] = {false, false};
    bool neg[2] = {false, false};
    double best = std::numeric_limits<double>::infinity();
    constexpr double grid[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    for (double a : grid) {
        const Vec2 x = em.point(a);
        for (double b : grid) {
            const Vec2 d = x - en.point(b);
            const double l1 = (cone.slope * d.x - d.y) / scale;
            const double l2 = (cone.slope * d.x + d.y) / scale;
            best = std::min({best, std::abs(l1), std::abs(l2)});
            (l1 >= 0.0 ? pos[0] : neg[0]) = true;
            (l2 >= 0.0 ? pos[1] : neg[1]) = true;
        }
    }
    if ((pos[0] && neg[0]) || (pos[1] && neg[1])) {
        return true;
    }
    return best < tau;
}

bool elements_touch(const Mesh& mesh, std::size_t m, std::size_t n) {
    const std::size_t M = mesh.size();
    return m == n || (m + 1) % M == n || (n + 1) % M == m;
}

bool needs_adaptive(const Mesh& mesh, std::size_t m, std::size_t n, const MaterialPair& mat1,
                    const MaterialPair& mat2, double tau) {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("needs_adaptive: tau must be positive");
    }
    if (elements_touch(mesh, m, n)) {
        return true;
    }
    const ElementFrame& em = mesh.element(m);
    const ElementFrame& en = mesh.element(n);
    return near_cone(em, en, cone_data(mat1), tau) || near_cone(em, en, cone_data(mat2), tau);
}

int smooth_gauss_order(const ElementFrame& e, Vec2 x, const MaterialPair& mat, double k0, double tol) {
    // r~^2(s) = eps1 (d0x - vx s)^2 + eps2 (d0y - vy s)^2 with d0 = x - midpoint.
    const Vec2 d0 = x - e.midpoint;
    const Vec2 v = e.tangent * (0.5 * e.length);
    const cplx a = mat.eps1() * (v.x * v.x) + mat.eps2() * (v.y * v.y);
    const cplx b = -2.0 * (mat.eps1() * (d0.x * v.x) + mat.eps2() * (d0.y * v.y));
    const cplx c = mat.eps1() * (d0.x * d0.x) + mat.eps2() * (d0.y * d0.y);
    cplx roots[2];
    int count = 0;
    if (std::abs(a) > 1e-14 * (std::abs(b) + std::abs(c))) {
        const cplx disc = std::sqrt(b * b - 4.0 * a * c);
        // Cancellation-free pair of roots.
        const cplx q = -0.5 * (b + (std::real(std::conj(b) * disc) >= 0.0 ? disc : -disc));
        roots[count++] = q / a;
        if (q != cplx(0.0)) roots[count++] = c / q;
    } else if (b != cplx(0.0)) {
        roots[count++] = -c / b;
    }
    double rho = std::numeric_limits<double>::infinity();
    for (int k = 0; k < count; ++k) {
        const cplx z = roots[k];
        const cplx w = std::sqrt(z * z - 1.0);
        rho = std::min(rho, std::max(std::abs(z + w), std::abs(z - w)));
    }
    if (!(rho > 1.0 + 1e-3)) return no_smooth_order;
    const double lr = std::log(std::min(rho, 1e6));
    // Growth of H0 over the ellipse for oscillatory or evanescent arguments.
    const double wave = k0 * std::sqrt(std::max(std::abs(mat.eps1()), std::abs(mat.eps2()))) * e.length;
    const int q = static_cast<int>(std::ceil(std::log(1.0 / tol) / (2.0 * lr) + wave)) + 1;
    return std::clamp(q, 2, no_smooth_order);
}

double log_moment(double p0, double p1, double q0, double q1) {
    // Moments of ln|t - s| on [-1,1]^2: 1 x 1 -> 4 ln 2 - 6, t x s -> -1;
    // the mixed moments vanish by the (t, s) -> (-t, -s) symmetry.
    constexpr double i00 = 4.0 * 0.69314718055994530942 - 6.0;
    constexpr double i11 = -1.0;
    return p0 * q0 * i00 + p1 * q1 * i11;
}

namespace {

struct Affine {
    double c0;  // value at 0
    double c1;  // slope
    double operator()(double t) const { return c0 + c1 * t; }
};

Affine affine(LocalBasis b) {
    switch (b) {
        case LocalBasis::constant:
            return {1.0, 0.0};
        case LocalBasis::p1_start:
            return {0.5, -0.5};
        case LocalBasis::p1_end:
            return {0.5, 0.5};
    }
    return {1.0, 0.0};
}

// int p(t) q(t - u) dt over the part of [-1, 1] where t - u stays in [-1, 1];
// the integrand is quadratic in t, so two Gauss points are exact.
double overlap_weight(const Affine& p, const Affine& q, double u) {
    const double lo = std::max(-1.0, u - 1.0);
    const double hi = std::min(1.0, u + 1.0);
    if (!(hi > lo)) return 0.0;
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    const double g = h / std::sqrt(3.0);
    const double t1 = c - g;
    const double t2 = c + g;
    return h * (p(t1) * q(t1 - u) + p(t2) * q(t2 - u));
}

constexpr int remainder_order = 24;

template <std::size_t K>
std::array<cplx, K> coincident(const ElementFrame& e, const KernelContext& ctx,
                               const std::array<std::pair<Affine, Affine>, K>& pairs) {
    const double lh = 0.5 * e.length;
    const double jac = lh * lh;
    const cplx c = ctx.mat.sqrt_product() / (2.0 * pi);
    const cplx dir = ctx.mat.eps1() * (e.tangent.x * e.tangent.x) + ctx.mat.eps2() * (e.tangent.y * e.tangent.y);
    const cplx lg = std::log(lh) + std::log(specfun::branch_sqrt(dir));
    std::array<cplx, K> out{};
    for (std::size_t k = 0; k < K; ++k) {
        const auto& [p, q] = pairs[k];
        out[k] = -c * jac * (log_moment(p.c0, p.c1, q.c0, q.c1) + 4.0 * p.c0 * q.c0 * lg);
    }
    if (ctx.k0 == 0.0) {
        return out;
    }
    // Remainder Phi - Phi0 depends on u = t - s only and is even in u;
    // u = 2 w^3 smooths the u^2 ln u behaviour at the origin.
    const QuadratureRule& g = gauss_rule(remainder_order);
    for (int i = 0; i < remainder_order; ++i) {
        const double w = 0.5 * (g.nodes[i] + 1.0);
        const double u = 2.0 * w * w * w;
        const double du = 0.5 * g.weights[i] * 6.0 * w * w;
        const cplx r = phi_minus_static(e.tangent * (u * lh), ctx);
        for (std::size_t k = 0; k < K; ++k) {
            const auto& [p, q] = pairs[k];
            out[k] += jac * r * du * (overlap_weight(p, q, u) + overlap_weight(p, q, -u));
        }
    }
    return out;
}

}  // namespace

cplx singular_pair_integral(const ElementFrame& e, LocalBasis basis_m, LocalBasis basis_n, const KernelContext& ctx,
                            KernelKind kind) {
    if (kind == KernelKind::double_layer) {
        // (x - y).nu(y) vanishes identically on a flat element.
        return 0.0;
    }
    const std::array<std::pair<Affine, Affine>, 1> pairs{{{affine(basis_m), affine(basis_n)}}};
    return coincident<1>(e, ctx, pairs)[0];
}

CoincidentSingleLayer coincident_single_layer(const ElementFrame& e, const KernelContext& ctx) {
    const Affine c = affine(LocalBasis::constant);
    const Affine a = affine(LocalBasis::p1_start);
    const Affine b = affine(LocalBasis::p1_end);
    const std::array<std::pair<Affine, Affine>, 5> pairs{{{c, c}, {a, a}, {a, b}, {b, a}, {b, b}}};
    const auto v = coincident<5>(e, ctx, pairs);
    CoincidentSingleLayer out;
    out.constant = v[0];
    out.p1[0][0] = v[1];
    out.p1[0][1] = v[2];
    out.p1[1][0] = v[3];
    out.p1[1][1] = v[4];
    return out;
}

void write_quadrature_csv(std::ostream& os, const std::vector<QuadratureRecord>& records) {
    os << "m,n,medium,cells_used,converged\n";
    for (const auto& r : records) {
        os << r.m << ',' << r.n << ',' << r.medium << ',' << r.cells_used << ',' << (r.converged ? 1 : 0) << '\n';
    }
}

}  // namespace hbem
