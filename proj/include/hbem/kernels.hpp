#pragma once

#include "hbem/medium.hpp"
#include "hbem/types.hpp"

namespace hbem {

/// One medium's Helmholtz data: Phi(x, y) = prefactor * H0(k0 r~(x, y)).
struct KernelContext {
    MaterialPair mat;
    double k0 = 0.0;
    cplx prefactor;  // (i/4) sqrt(eps1 eps2)

    KernelContext() : KernelContext(MaterialPair{}, 0.0) {}
    KernelContext(MaterialPair m, double wavenumber);
};

enum class Domain { interior, exterior };

struct PointSource {
    Vec2 location;
    cplx amplitude{1.0};
    Domain domain = Domain::interior;
};

/// Kernel value and the common factor of both normal derivatives for the
/// difference d = x - y:
///   dPhi/dnu~(y) =  g * d.nu(y)
///   dPhi/dnu~(x) = -g * d.nu(x)
/// With k0 = 0 the static kernel Phi0 is returned instead.
struct KernelValues {
    cplx phi;
    cplx g;
};

KernelValues kernel_values(Vec2 d, const KernelContext& ctx);

/// Phi(x, y); throws std::domain_error at x = y.
cplx phi(Vec2 x, Vec2 y, const KernelContext& ctx);

/// -(sqrt(eps1 eps2) / 2pi) ln r~, principal log.
cplx phi_static(Vec2 x, Vec2 y, const MaterialPair& mat);

cplx dphi_dnu_y(Vec2 x, Vec2 y, Vec2 nu_y, const KernelContext& ctx);
cplx dphi_dnu_x(Vec2 x, Vec2 y, Vec2 nu_x, const KernelContext& ctx);

/// Static double-layer kernel dPhi0/dnu~(y) = (sqrt / 2pi) d.nu(y) / r~^2.
cplx dphi0_dnu_y(Vec2 x, Vec2 y, Vec2 nu_y, const MaterialPair& mat);

/// Phi - Phi0 near the diagonal, where both terms are large but the
/// difference is smooth. Requires k0 > 0.
cplx phi_minus_static(Vec2 d, const KernelContext& ctx);

/// Data entering the right-hand side at a boundary point x with normal nu:
/// g1 = -c dPhi_j(x, x0)/dnu~_j(x), g2 = -c Phi_j(x, x0), j the source domain.
struct SourceData {
    cplx g1;
    cplx g2;
};

SourceData source_data(Vec2 x, Vec2 nu, const PointSource& src, const KernelContext& interior,
                       const KernelContext& exterior);

}  // namespace hbem
