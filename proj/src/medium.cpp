#include "hbem/medium.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hbem/specfun.hpp"

namespace hbem {

MaterialPair::MaterialPair(cplx eps1, cplx eps2)
    : eps1_(eps1),
      eps2_(eps2),
      sqrt_product_(specfun::branch_sqrt(eps1 * eps2)),
      hyperbolic_(eps1.real() * eps2.real() < 0.0) {
    if (eps1.imag() < 0.0 || eps2.imag() < 0.0) {
        throw ValidationError("permittivity must have nonnegative imaginary part");
    }
}

ConeData cone_data(const MaterialPair& mat) {
    if (!mat.hyperbolic()) {
        return {};
    }
    // Diagonal of (Re A)^{-1} with Re A taken entrywise.
    const double a11 = 1.0 / (1.0 / mat.eps1()).real();
    const double a22 = 1.0 / (1.0 / mat.eps2()).real();
    return {std::sqrt(-a11 / a22), true};
}

cplx deformed_distance(Vec2 dx, const MaterialPair& mat) {
    return specfun::branch_sqrt(mat.eps1() * (dx.x * dx.x) + mat.eps2() * (dx.y * dx.y));
}

CVec2 deformed_normal(Vec2 nu, const MaterialPair& mat) {
    return {nu.x / mat.eps1(), nu.y / mat.eps2()};
}

double half_cone_angle(const MaterialPair& mat) {
    if (!mat.hyperbolic()) {
        throw std::domain_error("half_cone_angle: material is not hyperbolic");
    }
    return std::atan(std::sqrt(-mat.eps1().real() / mat.eps2().real()));
}

double cone_boundary_distance(Vec2 dx, const ConeData& cone) {
    if (!cone.hyperbolic) {
        return std::numeric_limits<double>::infinity();
    }
    // Lines x2 = +-slope x1, i.e. slope x1 -+ x2 = 0.
    const double scale = std::sqrt(1.0 + cone.slope * cone.slope);
    const double d1 = std::abs(cone.slope * dx.x - dx.y);
    const double d2 = std::abs(cone.slope * dx.x + dx.y);
    return std::min(d1, d2) / scale;
}

double cone_boundary_distance(Vec2 dx, const MaterialPair& mat) {
    return cone_boundary_distance(dx, cone_data(mat));
}

}  // namespace hbem
