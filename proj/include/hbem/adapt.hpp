#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hbem/config.hpp"
#include "hbem/field.hpp"

namespace hbem {

/// L2 projection of the fine nodal trace onto the coarse P1 space. The fine
/// mesh must be the uniform refinement of `coarse`.
CVector project_p1(const SolutionPair& fine, const Mesh& coarse);
/// Elementwise length-weighted mean of the two children.
CVector project_p0(const SolutionPair& fine, const Mesh& coarse);

struct ErrorIndicators {
    std::vector<double> rho1;
    std::vector<double> rho2;
    double eta_tilde = 0.0;

    double total(std::size_t m) const { return rho1[m] + rho2[m]; }
};

ErrorIndicators local_indicators(const SolutionPair& fine, const Mesh& coarse);

/// Shortest prefix of the elements sorted by descending indicator (ties by
/// ascending id) whose mass reaches gamma * eta^2. Returned in ascending id
/// order; empty when eta is zero.
std::vector<std::size_t> dorfler_mark(const ErrorIndicators& ind, double gamma);

struct LevelReport {
    int level = 0;
    std::size_t M = 0;  // coarse node count
    double h_max = 0.0;
    double h_min = 0.0;
    double eta_tilde = 0.0;
    std::size_t marked = 0;
    std::optional<double> e1_hat;
    std::optional<double> e2_hat;
};

/// Columns level,M,h_max,h_min,eta_tilde,marked,e1_hat,e2_hat; missing errors
/// are left empty.
void write_levels_csv(std::ostream& os, const std::vector<LevelReport>& reports);

AssemblyOptions assembly_options(const ProblemConfig& cfg, unsigned threads = 0);

/// Galerkin solve on the given mesh.
SolutionPair solve_on_mesh(const MeshPtr& mesh, const ProblemConfig& cfg, const AssemblyOptions& opt,
                           AssemblyReport* report = nullptr);

struct AdaptiveResult {
    SolutionPair solution;  // on the uniform refinement of the final coarse mesh
    MeshPtr coarse;
    std::vector<LevelReport> reports;
};

/// Called once per level after the estimate, before marking; may fill the
/// error columns of the report.
using LevelHook = std::function<void(const SolutionPair& fine, LevelReport& report)>;

/// Refine, solve, estimate, mark, bisect; stops after cfg.levels or when the
/// estimator drops below a positive cfg.sigma.
AdaptiveResult adaptive_solve(const ProblemConfig& cfg, unsigned threads = 0, const LevelHook& hook = {});

}  // namespace hbem
