#include "hbem/field.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "hbem/io.hpp"
#include "hbem/parallel.hpp"

namespace hbem {

namespace {

// Per-element integrals, Jacobian included: [0] Phi, [1..2] double layer
// against the start/end hats, [3] conormal kernel.
CVals<4> element_potentials(Vec2 x, const ElementFrame& e, const KernelContext& ctx, Vec2 nu_x,
                            const PotentialOptions& opt) {
    const double tiny = 1e-14 * e.length;
    auto f = [&](double s) -> CVals<4> {
        const Vec2 d = x - e.point(s);
        if (std::abs(d.x) + std::abs(d.y) <= tiny) return {};
        const KernelValues kv = kernel_values(d, ctx);
        const cplx gn = kv.g * d.dot(e.normal);
        return {kv.phi, gn * (0.5 * (1.0 - s)), gn * (0.5 * (1.0 + s)), -kv.g * d.dot(nu_x)};
    };
    CVals<4> v{};
    const int q = smooth_gauss_order(e, x, ctx.mat, ctx.k0, opt.smooth_tol);
    if (q <= opt.max_smooth_order) {
        const QuadratureRule& r = gauss_rule(std::max(q, 3));
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
            const CVals<4> fi = f(r.nodes[i]);
            for (int k = 0; k < 4; ++k) v[k] += r.weights[i] * fi[k];
        }
    } else {
        // Split at the foot of x on the element's line, where a near-boundary
        // point puts its peak.
        const double foot = std::clamp((x - e.midpoint).dot(e.tangent) / (0.5 * e.length), -1.0, 1.0);
        const std::array<int, 4> groups{0, 1, 1, 2};
        AdaptiveStats st;
        if (foot > -1.0 + 1e-12 && foot < 1.0 - 1e-12) {
            v = adaptive_lobatto_1d<4>(f, -1.0, foot, opt.budget, st, groups);
            const CVals<4> w = adaptive_lobatto_1d<4>(f, foot, 1.0, opt.budget, st, groups);
            for (int k = 0; k < 4; ++k) v[k] += w[k];
        } else {
            v = adaptive_lobatto_1d<4>(f, -1.0, 1.0, opt.budget, st, groups);
        }
    }
    for (auto& c : v) c *= 0.5 * e.length;
    return v;
}

}  // namespace

LayerValues layer_potentials(Vec2 x, const Mesh& mesh, const CVector* c1, const CVector* c2, const KernelContext& ctx,
                             Vec2 nu_x, std::size_t skip, const PotentialOptions& opt) {
    const std::size_t M = mesh.size();
    if ((c1 && c1->size() != static_cast<Eigen::Index>(M)) || (c2 && c2->size() != static_cast<Eigen::Index>(M))) {
        throw std::invalid_argument("layer_potentials: density size does not match the mesh");
    }
    LayerValues out{};
    for (std::size_t n = 0; n < M; ++n) {
        if (n == skip) continue;
        const CVals<4> v = element_potentials(x, mesh.element(n), ctx, nu_x, opt);
        if (c2) {
            out.single += (*c2)(n) * v[0];
            out.conormal += (*c2)(n) * v[3];
        }
        if (c1) out.dbl += (*c1)(n) * v[1] + (*c1)(mesh.end_node(n)) * v[2];
    }
    return out;
}

cplx eval_field(Vec2 x, const SolutionPair& sol, const PointSource& src, const KernelContext& interior,
                const KernelContext& exterior, Domain which, bool* low_accuracy, const PotentialOptions& opt) {
    const Mesh& mesh = *sol.mesh;
    const auto [dist, nearest] = mesh.distance(x);
    if (low_accuracy) *low_accuracy = dist < mesh.element(nearest).length;
    const KernelContext& ctx = which == Domain::interior ? interior : exterior;
    const LayerValues lv = layer_potentials(x, mesh, &sol.c1, &sol.c2, ctx, {}, no_element, opt);
    cplx u = which == Domain::interior ? lv.single - lv.dbl : lv.dbl - lv.single;
    if (src.domain == which && src.amplitude != cplx(0.0)) {
        u -= src.amplitude * phi(x, src.location, ctx);
    }
    return u;
}

std::vector<FieldSample> compute_field(const SolutionPair& sol, const PointSource& src, const KernelContext& interior,
                                       const KernelContext& exterior, const FieldGrid& grid, unsigned threads) {
    std::vector<FieldSample> out(grid.nx * grid.ny);
    if (out.empty()) return out;
    const Mesh& mesh = *sol.mesh;
    auto coord = [](double lo, double hi, std::size_t n, std::size_t i) {
        return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    };
    parallel_for(out.size(), resolve_threads(threads), [&](std::size_t k) {
        const std::size_t i = k % grid.nx;
        const std::size_t j = k / grid.nx;
        FieldSample& s = out[k];
        s.x = coord(grid.x_min, grid.x_max, grid.nx, i);
        s.y = coord(grid.y_min, grid.y_max, grid.ny, j);
        const Vec2 p{s.x, s.y};
        const auto [dist, nearest] = mesh.distance(p);
        const bool masked = dist < mesh.element(nearest).length ||
                            (src.amplitude != cplx(0.0) && p.x == src.location.x && p.y == src.location.y);
        if (masked) {
            s.value = cplx(std::nan(""), std::nan(""));
            s.domain_id = 0;
            return;
        }
        const Domain which = mesh.contains(p) ? Domain::interior : Domain::exterior;
        s.domain_id = which == Domain::interior ? 1 : 2;
        s.value = eval_field(p, sol, src, interior, exterior, which);
    });
    return out;
}

void write_field_csv(std::ostream& os, const std::vector<FieldSample>& samples, bool imaginary) {
    os << "x,y,value,domain_id\n";
    for (const auto& s : samples) {
        os << io::num(s.x) << ',' << io::num(s.y) << ',';
        if (s.domain_id == 0) {
            os << "nan";
        } else {
            os << io::num(imaginary ? s.value.imag() : s.value.real());
        }
        os << ',' << s.domain_id << '\n';
    }
}

}  // namespace hbem
