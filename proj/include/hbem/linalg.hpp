#pragma once

#include <cstddef>

#include "hbem/assembly.hpp"

namespace hbem {

struct SolveReport {
    double residual = 0.0;  // ||Ax - b||_inf / (||A||_inf ||x||_inf)
    double growth = 0.0;    // max |U| / max |A|
    double min_pivot = 0.0;  // smallest |U_ii| relative to ||A||_inf
};

/// Partial-pivoting LU. Throws NumericalError naming the pivot index when a
/// pivot falls below n * eps * ||A||_inf.
CVector lu_solve(const CMatrix& a, const CVector& b, SolveReport* report = nullptr);

}  // namespace hbem
