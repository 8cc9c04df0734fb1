#include "hbem/reference.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hbem/io.hpp"

namespace hbem {

SolutionPair uniform_solve(const ProblemConfig& cfg, std::size_t M, unsigned threads, const AdaptiveBudget* budget) {
    cfg.validate();
    AssemblyOptions opt = assembly_options(cfg, threads);
    if (budget) opt.budget = *budget;
    return solve_on_mesh(build_initial_mesh(cfg.curve(), M), cfg, opt);
}

ReferenceSolution reference_solve(const ProblemConfig& cfg, std::size_t m_ref, unsigned threads) {
    AdaptiveBudget budget = cfg.quadrature;
    budget.rel_tol = std::min(budget.rel_tol, cfg.ref_rel_tol);
    budget.max_depth = std::max(budget.max_depth, 16);
    ReferenceSolution ref;
    ref.solution = uniform_solve(cfg, m_ref, threads, &budget);
    ref.m_ref = m_ref;
    ref.budget = budget;
    return ref;
}

RelativeErrors relative_errors(const SolutionPair& sol, const ReferenceSolution& ref) {
    return relative_errors(sol, ref.solution);
}

RelativeErrors relative_errors(const SolutionPair& sol, const SolutionPair& ref) {
    const Mesh& ms = *sol.mesh;
    const Mesh& mr = *ref.mesh;
    if (ms.curve().describe() != mr.curve().describe()) {
        throw ValidationError("relative_errors: solution and reference live on different curves");
    }
    if (mr.node_count() < ms.node_count()) {
        throw ValidationError("relative_errors: reference mesh (" + std::to_string(mr.node_count()) +
                              " nodes) is coarser than the solution (" + std::to_string(ms.node_count()) + ")");
    }
    const QuadratureRule& g = gauss_rule(3);
    const auto& snodes = ms.nodes();
    double num1 = 0.0, den1 = 0.0, num2 = 0.0, den2 = 0.0;
    std::vector<double> cuts;
    for (std::size_t r = 0; r < mr.size(); ++r) {
        const ElementFrame& er = mr.element(r);
        const double t0 = er.t_start;
        const double t1 = er.t_end;
        const cplx ra = ref.c1(static_cast<Eigen::Index>(r));
        const cplx rb = ref.c1(static_cast<Eigen::Index>(mr.end_node(r)));
        const cplx r2 = ref.c2(static_cast<Eigen::Index>(r));
        cuts.assign(1, t0);
        for (auto it = std::upper_bound(snodes.begin(), snodes.end(), t0); it != snodes.end() && *it < t1; ++it) {
            cuts.push_back(*it);
        }
        cuts.push_back(t1);
        for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
            const double a = cuts[p];
            const double b = cuts[p + 1];
            const auto [se, unused] = ms.locate(0.5 * (a + b));
            (void)unused;
            const ElementFrame& es = ms.element(se);
            const cplx sa = sol.c1(static_cast<Eigen::Index>(se));
            const cplx sb = sol.c1(static_cast<Eigen::Index>(ms.end_node(se)));
            const cplx s2 = sol.c2(static_cast<Eigen::Index>(se));
            const double ds = er.length * (b - a) / (t1 - t0) * 0.5;
            for (std::size_t q = 0; q < g.nodes.size(); ++q) {
                const double t = 0.5 * (a + b) + 0.5 * (b - a) * g.nodes[q];
                const double lr = (t - t0) / (t1 - t0);
                const double ls = (t - es.t_start) / (es.t_end - es.t_start);
                const cplx vr = (1.0 - lr) * ra + lr * rb;
                const cplx vs = (1.0 - ls) * sa + ls * sb;
                const double w = g.weights[q] * ds;
                num1 += w * std::norm(vs - vr);
                den1 += w * std::norm(vr);
                num2 += w * std::norm(s2 - r2);
                den2 += w * std::norm(r2);
            }
        }
    }
    if (den1 <= 0.0 || den2 <= 0.0) throw NumericalError("relative_errors: reference trace vanishes");
    return {std::sqrt(num1 / den1), std::sqrt(num2 / den2)};
}

void write_trace_csv(std::ostream& os, const SolutionPair& sol) {
    const Mesh& mesh = *sol.mesh;
    os << "t,s_arclength,re_phi1,im_phi1,re_phi2,im_phi2\n";
    double s = 0.0;
    for (std::size_t m = 0; m < mesh.size(); ++m) {
        const ElementFrame& e = mesh.element(m);
        const cplx p1 =
            0.5 * (sol.c1(static_cast<Eigen::Index>(m)) + sol.c1(static_cast<Eigen::Index>(mesh.end_node(m))));
        const cplx p2 = sol.c2(static_cast<Eigen::Index>(m));
        os << io::num(0.5 * (e.t_start + e.t_end)) << ',' << io::num(s + 0.5 * e.length) << ',' << io::num(p1.real())
           << ',' << io::num(p1.imag()) << ',' << io::num(p2.real()) << ',' << io::num(p2.imag()) << '\n';
        s += e.length;
    }
}

}  // namespace hbem
