#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

#include "hbem/assembly.hpp"

namespace hbem {

/// Discrete traces: phi1 = sum c1_n hat_n (nodal), phi2 = sum c2_m chi_m.
struct SolutionPair {
    MeshPtr mesh;
    CVector c1;
    CVector c2;
};

struct PotentialOptions {
    AdaptiveBudget budget{1e-10, 0.0, 40};
    double smooth_tol = 1e-12;
    int max_smooth_order = 24;
};

/// Layer potentials of one medium at x:
///   single    = int Phi(x, y) phi2(y) ds_y
///   dbl       = int dPhi/dnu~(y) phi1(y) ds_y
///   conormal  = int dPhi/dnu~(x) phi2(y) ds_y, the conormal taken along nu_x
struct LayerValues {
    cplx single;
    cplx dbl;
    cplx conormal;
};

inline constexpr std::size_t no_element = std::numeric_limits<std::size_t>::max();

/// Either density may be null. Element `skip` is left out; pass the element
/// containing x when x lies on the boundary (the double-layer and conormal
/// kernels vanish there on a flat element).
LayerValues layer_potentials(Vec2 x, const Mesh& mesh, const CVector* c1, const CVector* c2, const KernelContext& ctx,
                             Vec2 nu_x = {}, std::size_t skip = no_element, const PotentialOptions& opt = {});

/// Representation formula in the requested domain:
///   interior: u1 = S1 phi2 - D1 phi1 - P1 f1
///   exterior: u2 = D2 phi1 - S2 phi2 - P2 f2
/// `low_accuracy` is set when x is closer to the boundary than the nearest
/// element's length.
cplx eval_field(Vec2 x, const SolutionPair& sol, const PointSource& src, const KernelContext& interior,
                const KernelContext& exterior, Domain which, bool* low_accuracy = nullptr,
                const PotentialOptions& opt = {});

struct FieldGrid {
    double x_min = -3.0;
    double x_max = 3.0;
    double y_min = -2.0;
    double y_max = 2.0;
    std::size_t nx = 0;
    std::size_t ny = 0;
};

struct FieldSample {
    double x;
    double y;
    cplx value;
    int domain_id;  // 1 interior, 2 exterior, 0 masked (within one local element of the boundary)
};

std::vector<FieldSample> compute_field(const SolutionPair& sol, const PointSource& src, const KernelContext& interior,
                                       const KernelContext& exterior, const FieldGrid& grid, unsigned threads = 0);

/// Columns x,y,value,domain_id; masked values are written as nan.
void write_field_csv(std::ostream& os, const std::vector<FieldSample>& samples, bool imaginary);

}  // namespace hbem
