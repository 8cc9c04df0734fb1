#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "hbem/adapt.hpp"
#include "hbem/linalg.hpp"
#include "oracle/trace_errors.hpp"

using namespace hbem;
using oracle::Trace;
using oracle::trace_errors;

namespace {

cplx hankel(int n, double x) {
    const double sg = (n < 0 && (-n) % 2) ? -1.0 : 1.0;
    n = std::abs(n);
    return sg * cplx{std::cyl_bessel_j(n, x), std::cyl_neumann(n, x)};
}
cplx hankel_d(int n, double x) { return 0.5 * (hankel(n - 1, x) - hankel(n + 1, x)); }
double bessel(int n, double x) {
    const double sg = (n < 0 && (-n) % 2) ? -1.0 : 1.0;
    return sg * std::cyl_bessel_j(std::abs(n), x);
}
double bessel_d(int n, double x) { return 0.5 * (bessel(n - 1, x) - bessel(n + 1, x)); }

// Proportional media: interior (E1, E2), exterior beta (E1, E2), boundary the
// ellipse with semi-axes 1/sqrt(E1), 1/sqrt(E2). Scaling X = sqrt(E1) x,
// Y = sqrt(E2) y maps the problem onto a unit disk with isotropic media 1 and
// beta, solved exactly by separation of variables.
struct ScaledDisk {
    double E1, E2, beta;
    Vec2 x0;
    cplx c;
    static constexpr int modes = 40;
    std::vector<cplx> b;

    ScaledDisk(double e1, double e2, double bt, Vec2 src, cplx amp)
        : E1(e1), E2(e2), beta(bt), x0(src), c(amp), b(2 * modes + 1) {
        const double k1 = 1.0;
        const double k2 = std::sqrt(beta);
        const Vec2 X0{x0.x * std::sqrt(E1), x0.y * std::sqrt(E2)};
        const cplx cs = c * std::sqrt(E1 * E2);
        const double r0 = X0.norm();
        const double th0 = std::atan2(X0.y, X0.x);
        for (int n = -modes; n <= modes; ++n) {
            // Incident mode of (i/4) H0(k1 |X - X0|) outside r0, then the
            // interior regular and exterior outgoing coefficients from the
            // continuity of u and of the conormal flux at r = 1.
            const cplx s = -cs * cplx(0, 0.25) * bessel(n, k1 * r0) * std::exp(cplx(0, -n * th0));
            const cplx a11 = bessel(n, k1), a12 = -hankel(n, k2);
            const cplx a21 = k1 * bessel_d(n, k1), a22 = -(k2 / beta) * hankel_d(n, k2);
            const cplx r1 = -s * hankel(n, k1), r2 = -k1 * s * hankel_d(n, k1);
            b[n + modes] = (a11 * r2 - a21 * r1) / (a11 * a22 - a12 * a21);
        }
    }

    ProblemConfig config() const {
        ProblemConfig cfg;
        cfg.geometry.a = 1.0 / std::sqrt(E1);
        cfg.geometry.b = 1.0 / std::sqrt(E2);
        cfg.interior = MaterialPair(E1, E2);
        cfg.exterior = MaterialPair(beta * E1, beta * E2);
        cfg.k0 = 1.0;
        cfg.source = {x0, c, Domain::interior};
        return cfg;
    }

    void operator()(double t, cplx& p1, cplx& p2) const {
        const double k2 = std::sqrt(beta);
        p1 = p2 = 0.0;
        for (int n = -modes; n <= modes; ++n) {
            const cplx e = std::exp(cplx(0, n * t));
            p1 += b[n + modes] * hankel(n, k2) * e;
            p2 += (k2 / beta) * b[n + modes] * hankel_d(n, k2) * e;
        }
        // Radial flux in the disk to the conormal derivative on the ellipse.
        const double nx = std::cos(t) / std::sqrt(E2);
        const double ny = std::sin(t) / std::sqrt(E1);
        const double nn = std::hypot(nx, ny);
        p2 *= std::hypot(nx / nn / std::sqrt(E1), ny / nn / std::sqrt(E2));
    }
};

}  // namespace

TEST_CASE("isotropic disk against the Bessel series") {
    const ScaledDisk exact(1.0, 1.0, 2.0, {0.3, 0.2}, cplx(-1.0));
    const ProblemConfig cfg = exact.config();
    std::pair<double, double> prev{};
    for (std::size_t M : {32u, 64u, 128u}) {
        const auto e = trace_errors(solve_on_mesh(build_initial_mesh(cfg.curve(), M), cfg, assembly_options(cfg)),
                                    std::cref(exact));
        if (M == 64) {
            CHECK(e.first <= 1e-2);
            CHECK(e.second <= 3e-2);
        }
        if (M > 32) {
            // P1 traces converge at second order, P0 at first.
            CHECK(prev.first / e.first >= 3.0);
            CHECK(prev.second / e.second >= 1.6);
        }
        prev = e;
    }
}

TEST_CASE("anisotropic ellipse against the scaled disk") {
    for (auto [e1, e2] : {std::pair{2.0, 0.5}, std::pair{0.7, 3.0}}) {
        const ScaledDisk exact(e1, e2, 2.0, {0.3, 0.2}, cplx(0.5, -1.0));
        const ProblemConfig cfg = exact.config();
        std::pair<double, double> prev{};
        for (std::size_t M : {48u, 96u}) {
            const auto e = trace_errors(
                solve_on_mesh(build_initial_mesh(cfg.curve(), M), cfg, assembly_options(cfg)), std::cref(exact));
            if (M == 96) {
                CHECK(e.first <= 5e-3);
                CHECK(e.second <= 3e-2);
                CHECK(prev.first / e.first >= 3.0);
                CHECK(prev.second / e.second >= 1.6);
            }
            prev = e;
        }
    }
}

TEST_CASE("identical media: the identity block is singular for an even element count") {
    // P0 tested against P1 on a closed curve annihilates the alternating
    // nodal vector when the element count is even.
    const MeshPtr mesh = build_initial_mesh(std::make_shared<const Curve>(Curve::ellipse(2.0, 1.0)), 10);
    CVector alt(10);
    for (Eigen::Index i = 0; i < 10; ++i) alt(i) = i % 2 ? -1.0 : 1.0;
    CHECK((assemble_I(*mesh) * alt).cwiseAbs().maxCoeff() <= 1e-15);

    ProblemConfig cfg;
    cfg.exterior = cfg.interior;
    cfg.source = {{0.3, 0.2}, cplx(-1.0), Domain::interior};
    CHECK_THROWS_AS(solve_on_mesh(build_initial_mesh(cfg.curve(), 100), cfg, assembly_options(cfg)),
                    NumericalError);
}

TEST_CASE("identical media with an odd element count recovers the source traces") {
    // 101 -> 203 halves the element size; 201 would fall just short of it.
    ProblemConfig cfg;
    cfg.interior = MaterialPair(cplx(2, 0.1), cplx(1, 0.05));
    cfg.exterior = cfg.interior;
    cfg.source = {{0.3, 0.2}, cplx(-1.0), Domain::interior};
    const KernelContext ctx = cfg.interior_context();
    const Curve& curve = *cfg.curve();
    const Trace exact = [&](double t, cplx& p1, cplx& p2) {
        const Vec2 x = curve.point(t);
        const Vec2 tan{-2.0 * std::sin(t), std::cos(t)};
        const Vec2 nu = Vec2{tan.y, -tan.x} * (1.0 / tan.norm());
        p1 = -cfg.source.amplitude * phi(x, cfg.source.location, ctx);
        p2 = -cfg.source.amplitude * dphi_dnu_x(x, cfg.source.location, nu, ctx);
    };
    const auto a = trace_errors(solve_on_mesh(build_initial_mesh(cfg.curve(), 101), cfg, assembly_options(cfg)), exact);
    const auto b = trace_errors(solve_on_mesh(build_initial_mesh(cfg.curve(), 203), cfg, assembly_options(cfg)), exact);
    MESSAGE("M=101: " << a.first << " " << a.second << "  M=203: " << b.first << " " << b.second);
    CHECK(a.first <= 1e-2);
    CHECK(a.second <= 8e-2);
    CHECK(a.first / b.first >= 2.0);
    CHECK(a.second / b.second >= 2.0);
}
