#pragma once

#include "hbem/types.hpp"

namespace hbem {

/// Principal permittivities of a homogeneous medium. eps1 acts along x1
/// (perpendicular), eps2 along x2 (parallel); A = diag(1/eps1, 1/eps2).
class MaterialPair {
public:
    MaterialPair() : MaterialPair(cplx{1.0}, cplx{1.0}) {}
    MaterialPair(cplx eps1, cplx eps2);

    static MaterialPair isotropic(cplx eps) { return {eps, eps}; }

    cplx eps1() const { return eps1_; }
    cplx eps2() const { return eps2_; }
    /// Re eps1 * Re eps2 < 0.
    bool hyperbolic() const { return hyperbolic_; }
    /// branch_sqrt(eps1 * eps2).
    cplx sqrt_product() const { return sqrt_product_; }
    /// eps1 * eps2.
    cplx product() const { return eps1_ * eps2_; }

    bool operator==(const MaterialPair& o) const { return eps1_ == o.eps1_ && eps2_ == o.eps2_; }

private:
    cplx eps1_;
    cplx eps2_;
    cplx sqrt_product_;
    bool hyperbolic_;
};

/// Boundary lines of the propagating cone {x : x^T (Re A)^{-1} x > 0}.
struct ConeData {
    double slope = 0.0;  // |x2 / x1| along the cone boundary
    bool hyperbolic = false;
};

ConeData cone_data(const MaterialPair& mat);

/// branch_sqrt(eps1 dx1^2 + eps2 dx2^2).
cplx deformed_distance(Vec2 dx, const MaterialPair& mat);

/// A nu = (nu1 / eps1, nu2 / eps2).
CVec2 deformed_normal(Vec2 nu, const MaterialPair& mat);

/// arctan sqrt(-Re eps1 / Re eps2); throws std::domain_error unless hyperbolic.
double half_cone_angle(const MaterialPair& mat);

/// Euclidean distance from dx to the union of the two cone boundary lines.
/// Returns +infinity for non-hyperbolic media.
double cone_boundary_distance(Vec2 dx, const MaterialPair& mat);
double cone_boundary_distance(Vec2 dx, const ConeData& cone);

}  // namespace hbem
