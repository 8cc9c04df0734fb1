#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hbem/assembly.hpp"
#include "oracle/brute_force.hpp"

namespace oracle {

using namespace hbem;

// Brute-force element-pair integrals in the layout of pair_integrals,
// written out from the definitions with d = x(t) - y(s):
//   [0] Phi, [1..2] dPhi/dnu~(y) b_k(s), [3..6] Phi a_i(t) b_k(s),
//   [7..8] dPhi/dnu~(x) a_i(t) with x, y exchanged.
inline PairValues brute_pair(const Mesh& mesh, std::size_t m, std::size_t n, const KernelContext& ctx, int panels) {
    const ElementFrame& em = mesh.element(m);
    const ElementFrame& en = mesh.element(n);
    auto hat = [](int k, double s) { return k == 0 ? 0.5 * (1.0 - s) : 0.5 * (1.0 + s); };
    // Normal components of d expanded term by term, so that they vanish
    // exactly (up to tangent.normal rounding) on a coincident pair.
    const Vec2 base = em.midpoint - en.midpoint;
    const Vec2 tm = em.tangent * (0.5 * em.length);
    const Vec2 tn = en.tangent * (0.5 * en.length);
    auto d_nu_n = [&](double t, double s) { return base.dot(en.normal) + t * tm.dot(en.normal) - s * tn.dot(en.normal); };
    auto d_nu_m = [&](double t, double s) { return base.dot(em.normal) + t * tm.dot(em.normal) - s * tn.dot(em.normal); };
    auto value = [&](int c, double t, double s) -> cd {
        const Vec2 d = em.point(t) - en.point(s);
        if (d.norm() < 1e-14) return 0.0;
        const KernelValues kv = kernel_values(d, ctx);
        if (c == 0) return kv.phi;
        if (c <= 2) return kv.g * d_nu_n(t, s) * hat(c - 1, s);
        if (c <= 6) return kv.phi * hat((c - 3) / 2, t) * hat((c - 3) % 2, s);
        return -kv.g * d_nu_m(t, s) * hat(c - 7, t);
    };
    PairValues out{};
    const double jac = 0.25 * em.length * en.length;
    if (m != n && elements_touch(mesh, m, n)) {
        // Polar coordinates about the shared vertex, split at the directions
        // in which x - y runs along a cone boundary line.
        const bool m_ends = (m + 1) % mesh.size() == n;
        const Vec2 u = em.tangent * (m_ends ? -1.0 : 1.0);
        const Vec2 w = en.tangent * (m_ends ? 1.0 : -1.0);
        const double la = em.length, lb = en.length;
        std::vector<double> cuts{0.0, std::atan2(lb, la), 0.5 * pi};
        const ConeData cone = cone_data(ctx.mat);
        if (cone.hyperbolic) {
            for (double k : {cone.slope, -cone.slope}) {
                // a (u_y - k u_x) = b (w_y - k w_x)
                const double num = u.y - k * u.x, den = w.y - k * w.x;
                if (den != 0.0 && num / den > 0.0) cuts.push_back(std::atan(num / den));
            }
        }
        std::sort(cuts.begin(), cuts.end());
        auto ts = [&](double a) { return m_ends ? 1.0 - 2.0 * a / la : -1.0 + 2.0 * a / la; };
        auto ss = [&](double b) { return m_ends ? -1.0 + 2.0 * b / lb : 1.0 - 2.0 * b / lb; };
        boost::math::quadrature::tanh_sinh<double> rule(12);
        for (int c = 0; c < 9; ++c) {
            for (bool imag : {false, true}) {
                auto outer = [&](double th) {
                    const double rmax = std::min(la / std::cos(th), lb / std::sin(th));
                    auto inner = [&](double r) {
                        const cd v = value(c, ts(r * std::cos(th)), ss(r * std::sin(th)));
                        return r * (imag ? v.imag() : v.real());
                    };
                    return rule.integrate(inner, 0.0, rmax, 1e-12);
                };
                double acc = 0.0;
                for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
                    if (cuts[k + 1] > cuts[k]) acc += rule.integrate(outer, cuts[k], cuts[k + 1], 1e-12);
                }
                out[c] += imag ? cd(0.0, acc) : cd(acc);
            }
        }
        return out;
    }
    if (m == n) {
        for (int c = 0; c < 9; ++c) {
            out[c] = jac * nested_tanh_sinh([&](double t, double s) { return value(c, t, s); }, 1e-11);
        }
        return out;
    }
    const auto rule = composite_gauss(-1.0, 1.0, panels);
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        for (std::size_t j = 0; j < rule.x.size(); ++j) {
            const double w = rule.w[i] * rule.w[j] * jac;
            const Vec2 d = em.point(rule.x[i]) - en.point(rule.x[j]);
            const KernelValues kv = kernel_values(d, ctx);
            out[0] += w * kv.phi;
            for (int k = 0; k < 2; ++k) {
                out[1 + k] += w * kv.g * d_nu_n(rule.x[i], rule.x[j]) * hat(k, rule.x[j]);
                out[7 + k] -= w * kv.g * d_nu_m(rule.x[i], rule.x[j]) * hat(k, rule.x[i]);
                for (int a = 0; a < 2; ++a) out[3 + 2 * a + k] += w * kv.phi * hat(a, rule.x[i]) * hat(k, rule.x[j]);
            }
        }
    }
    return out;
}

inline double pair_error(const PairValues& a, const PairValues& b) {
    double err = 0.0;
    double scale = 0.0;
    for (int c = 0; c < 9; ++c) {
        err = std::max(err, std::abs(a[c] - b[c]));
        scale = std::max(scale, std::abs(b[c]));
    }
    return err / scale;
}

}  // namespace oracle
