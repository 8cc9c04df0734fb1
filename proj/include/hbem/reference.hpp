#pragma once

#include <cstddef>
#include <iosfwd>

#include "hbem/adapt.hpp"

namespace hbem {

struct ReferenceSolution {
    SolutionPair solution;
    std::size_t m_ref = 0;
    AdaptiveBudget budget;
};

/// Uniform solve with M elements straight from the initial mesh builder.
SolutionPair uniform_solve(const ProblemConfig& cfg, std::size_t M, unsigned threads = 0,
                           const AdaptiveBudget* budget = nullptr);

/// Uniform solve on m_ref elements with the quadrature tolerance tightened to
/// cfg.ref_rel_tol.
ReferenceSolution reference_solve(const ProblemConfig& cfg, std::size_t m_ref, unsigned threads = 0);

struct RelativeErrors {
    double e1 = 0.0;
    double e2 = 0.0;
};

/// Relative L2 errors of sol against ref, with sol evaluated in the curve
/// parameter at Gauss points on the reference mesh. Throws ValidationError
/// when the curves differ or the reference is coarser than sol.
RelativeErrors relative_errors(const SolutionPair& sol, const ReferenceSolution& ref);
RelativeErrors relative_errors(const SolutionPair& sol, const SolutionPair& ref);

/// Trace values at element midpoints: columns t,s_arclength,re_phi1,im_phi1,
/// re_phi2,im_phi2. s is the chord arc length up to the midpoint.
void write_trace_csv(std::ostream& os, const SolutionPair& sol);

}  // namespace hbem
