#pragma once

#include "hbem/types.hpp"

/// Complex special functions behind the anisotropic fundamental solution.
///
/// Every routine is pure and reentrant. Arguments of the Hankel functions are
/// restricted to the closed first quadrant (minus the origin), which is where
/// k0 times a deformed distance lands for lossy or lossless media.
namespace hbem::specfun {

/// Square root analytic on C \ {-it : t >= 0}: |z|^{1/2} exp(i arg(z) / 2)
/// with arg(z) in (-pi/2, 3pi/2). Throws std::domain_error on the cut.
cplx branch_sqrt(cplx z);

/// H0^(1)(z). Throws std::domain_error at z = 0 or outside the quadrant.
cplx hankel1_0(cplx z);

/// H1^(1)(z). Same domain as hankel1_0.
cplx hankel1_1(cplx z);

struct HankelPair {
    cplx h0;
    cplx h1;
};

/// Both orders at once; the kernels always need the pair.
HankelPair hankel1_01(cplx z);

/// The ascending series is used while |z| + Im z stays below this reach;
/// its cancellation error grows like eps * exp(|z| + Im z). Beyond it a
/// continued fraction for K0, K1 at -iz takes over.
inline constexpr double series_reach = 10.0;

}  // namespace hbem::specfun
