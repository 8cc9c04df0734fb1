#include "hbem/kernels.hpp"

#include <stdexcept>

#include "hbem/specfun.hpp"

namespace hbem {

KernelContext::KernelContext(MaterialPair m, double wavenumber)
    : mat(m), k0(wavenumber), prefactor(cplx{0.0, 0.25} * m.sqrt_product()) {
    if (!(k0 >= 0.0)) {
        throw ValidationError("wavenumber must be nonnegative");
    }
}

namespace {

void check_distinct(Vec2 d) {
    if (d.x == 0.0 && d.y == 0.0) {
        throw std::domain_error("kernel evaluated at coincident points");
    }
}

}  // namespace

KernelValues kernel_values(Vec2 d, const KernelContext& ctx) {
    check_distinct(d);
    const cplx rt = deformed_distance(d, ctx.mat);
    if (ctx.k0 == 0.0) {
        const cplx c = ctx.mat.sqrt_product() / (2.0 * pi);
        // Limited-range division by rt^2 would square |rt|^2 and underflow.
        return {-c * std::log(rt), c / rt / rt};
    }
    const auto h = specfun::hankel1_01(ctx.k0 * rt);
    return {ctx.prefactor * h.h0, ctx.prefactor * ctx.k0 * h.h1 / rt};
}

cplx phi(Vec2 x, Vec2 y, const KernelContext& ctx) { return kernel_values(x - y, ctx).phi; }

cplx phi_static(Vec2 x, Vec2 y, const MaterialPair& mat) {
    const Vec2 d = x - y;
    check_distinct(d);
    return -mat.sqrt_product() / (2.0 * pi) * std::log(deformed_distance(d, mat));
}

cplx dphi_dnu_y(Vec2 x, Vec2 y, Vec2 nu_y, const KernelContext& ctx) {
    const Vec2 d = x - y;
    return kernel_values(d, ctx).g * d.dot(nu_y);
}

cplx dphi_dnu_x(Vec2 x, Vec2 y, Vec2 nu_x, const KernelContext& ctx) {
    const Vec2 d = x - y;
    return -kernel_values(d, ctx).g * d.dot(nu_x);
}

cplx dphi0_dnu_y(Vec2 x, Vec2 y, Vec2 nu_y, const MaterialPair& mat) {
    const Vec2 d = x - y;
    check_distinct(d);
    const cplx rt2 = mat.eps1() * (d.x * d.x) + mat.eps2() * (d.y * d.y);
    return mat.sqrt_product() / (2.0 * pi) * d.dot(nu_y) / rt2;
}

cplx phi_minus_static(Vec2 d, const KernelContext& ctx) {
    const cplx rt = deformed_distance(d, ctx.mat);
    const cplx z = ctx.k0 * rt;
    const cplx c = ctx.mat.sqrt_product() / (2.0 * pi);
    if (std::abs(z) > 0.25) {
        return ctx.prefactor * specfun::hankel1_0(z) + c * std::log(rt);
    }
    // (i/4) H0(z) = (i/4) J0(z) - (1/2pi) [(ln(z/2) + gamma) J0(z) - sum]; the
    // ln r~ parts cancel against Phi0, leaving ln(k0/2) + gamma.
    constexpr double euler_gamma = 0.57721566490153286061;
    const cplx q = -0.25 * z * z;
    cplx j0 = 1.0;
    cplx ysum = 0.0;
    cplx term = 1.0;
    double harmonic = 0.0;
    for (int k = 1; k < 30; ++k) {
        term *= q / double(k * k);
        harmonic += 1.0 / k;
        j0 += term;
        ysum += harmonic * term;
        if (std::abs(term) < 1e-18) break;
    }
    const double lk = std::log(0.5 * ctx.k0) + euler_gamma;
    return ctx.prefactor * j0 - c * (lk * j0 - ysum) - c * std::log(rt) * (j0 - 1.0);
}

SourceData source_data(Vec2 x, Vec2 nu, const PointSource& src, const KernelContext& interior,
                       const KernelContext& exterior) {
    const KernelContext& ctx = src.domain == Domain::interior ? interior : exterior;
    if (src.amplitude == cplx{0.0}) {
        return {};
    }
    const Vec2 d = x - src.location;
    const KernelValues kv = kernel_values(d, ctx);
    return {src.amplitude * kv.g * d.dot(nu), -src.amplitude * kv.phi};
}

}  // namespace hbem
