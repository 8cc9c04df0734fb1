#include "hbem/adapt.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "hbem/io.hpp"
#include "hbem/linalg.hpp"

namespace hbem {

namespace {

void check_refinement(const SolutionPair& fine, const Mesh& coarse) {
    const Mesh& f = *fine.mesh;
    const std::size_t M = coarse.size();
    bool ok = f.size() == 2 * M && fine.c1.size() == static_cast<Eigen::Index>(f.node_count()) &&
              fine.c2.size() == static_cast<Eigen::Index>(f.size()) && f.lineage().size() == f.size();
    for (std::size_t j = 0; ok && j < f.size(); ++j) {
        ok = f.lineage()[j].parent == static_cast<int>(j / 2) && f.lineage()[j].split;
    }
    for (std::size_t m = 0; ok && m < M; ++m) ok = f.nodes()[2 * m] == coarse.nodes()[m];
    if (!ok) throw std::invalid_argument("adapt: fine solution is not on the uniform refinement of the coarse mesh");
}

// Fine node k as a combination of coarse hats: node 2m is coarse node m,
// node 2m+1 is the parameter midpoint of coarse element m.
struct Prolong {
    std::size_t idx[2];
    double w[2];
    int n;
};

Prolong prolong(std::size_t k, const Mesh& coarse) {
    const std::size_t m = k / 2;
    if (k % 2 == 0) return {{m, m}, {1.0, 0.0}, 1};
    return {{m, coarse.end_node(m)}, {0.5, 0.5}, 2};
}

}  // namespace

CVector project_p1(const SolutionPair& fine, const Mesh& coarse) {
    check_refinement(fine, coarse);
    const Mesh& f = *fine.mesh;
    const auto M = static_cast<Eigen::Index>(coarse.node_count());
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(M, M);
    CVector b = CVector::Zero(M);
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double l = f.element(j).length;
        const std::size_t nodes[2] = {j, f.end_node(j)};
        const Prolong p[2] = {prolong(nodes[0], coarse), prolong(nodes[1], coarse)};
        for (int a = 0; a < 2; ++a) {
            for (int c = 0; c < 2; ++c) {
                const double mloc = l * (a == c ? 2.0 : 1.0) / 6.0;
                for (int i = 0; i < p[a].n; ++i) {
                    const auto row = static_cast<Eigen::Index>(p[a].idx[i]);
                    b(row) += p[a].w[i] * mloc * fine.c1(static_cast<Eigen::Index>(nodes[c]));
                    for (int k = 0; k < p[c].n; ++k) {
                        mass(row, static_cast<Eigen::Index>(p[c].idx[k])) += p[a].w[i] * mloc * p[c].w[k];
                    }
                }
            }
        }
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(mass);
    if (llt.info() != Eigen::Success) throw NumericalError("adapt: coarse mass matrix is not positive definite");
    CVector c(M);
    c.real() = llt.solve(b.real().eval());
    c.imag() = llt.solve(b.imag().eval());
    return c;
}

CVector project_p0(const SolutionPair& fine, const Mesh& coarse) {
    check_refinement(fine, coarse);
    const Mesh& f = *fine.mesh;
    CVector c(static_cast<Eigen::Index>(coarse.size()));
    for (std::size_t m = 0; m < coarse.size(); ++m) {
        const double l0 = f.element(2 * m).length;
        const double l1 = f.element(2 * m + 1).length;
        c(static_cast<Eigen::Index>(m)) =
            (l0 * fine.c2(static_cast<Eigen::Index>(2 * m)) + l1 * fine.c2(static_cast<Eigen::Index>(2 * m + 1))) /
            (l0 + l1);
    }
    return c;
}

ErrorIndicators local_indicators(const SolutionPair& fine, const Mesh& coarse) {
    const CVector p1 = project_p1(fine, coarse);
    const CVector p0 = project_p0(fine, coarse);
    const Mesh& f = *fine.mesh;
    // Fine-space difference of the nodal trace and its projection.
    CVector d(static_cast<Eigen::Index>(f.node_count()));
    for (std::size_t k = 0; k < f.node_count(); ++k) {
        const Prolong p = prolong(k, coarse);
        cplx v = 0.0;
        for (int i = 0; i < p.n; ++i) v += p.w[i] * p1(static_cast<Eigen::Index>(p.idx[i]));
        d(static_cast<Eigen::Index>(k)) = fine.c1(static_cast<Eigen::Index>(k)) - v;
    }
    ErrorIndicators ind;
    ind.rho1.assign(coarse.size(), 0.0);
    ind.rho2.assign(coarse.size(), 0.0);
    double total = 0.0;
    for (std::size_t m = 0; m < coarse.size(); ++m) {
        const double h = coarse.element(m).length;
        double r1 = 0.0;
        double r2 = 0.0;
        for (std::size_t j = 2 * m; j < 2 * m + 2; ++j) {
            const double l = f.element(j).length;
            r1 += std::norm(d(static_cast<Eigen::Index>(f.end_node(j))) - d(static_cast<Eigen::Index>(j))) / l;
            r2 += l * std::norm(fine.c2(static_cast<Eigen::Index>(j)) - p0(static_cast<Eigen::Index>(m)));
        }
        ind.rho1[m] = h * r1;
        ind.rho2[m] = h * r2;
        total += ind.rho1[m] + ind.rho2[m];
    }
    ind.eta_tilde = std::sqrt(total);
    return ind;
}

std::vector<std::size_t> dorfler_mark(const ErrorIndicators& ind, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("dorfler_mark: gamma must lie in (0, 1)");
    const std::size_t M = ind.rho1.size();
    std::vector<std::size_t> order(M);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ind.total(a) > ind.total(b); });
    // The total from the indicators themselves; squaring eta_tilde back can
    // round the target above an exact partial sum.
    double total = 0.0;
    for (std::size_t m = 0; m < M; ++m) total += ind.total(m);
    const double target = gamma * total;
    std::vector<std::size_t> out;
    if (target <= 0.0) return out;
    double sum = 0.0;
    for (std::size_t m : order) {
        out.push_back(m);
        sum += ind.total(m);
        if (sum >= target) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

void write_levels_csv(std::ostream& os, const std::vector<LevelReport>& reports) {
    os << "level,M,h_max,h_min,eta_tilde,marked,e1_hat,e2_hat\n";
    for (const auto& r : reports) {
        os << r.level << ',' << r.M << ',' << io::num(r.h_max) << ',' << io::num(r.h_min) << ','
           << io::num(r.eta_tilde) << ',' << r.marked << ',' << (r.e1_hat ? io::num(*r.e1_hat) : "") << ','
           << (r.e2_hat ? io::num(*r.e2_hat) : "") << '\n';
    }
}

AssemblyOptions assembly_options(const ProblemConfig& cfg, unsigned threads) {
    AssemblyOptions opt;
    opt.tau = cfg.tau;
    opt.budget = cfg.quadrature;
    opt.threads = threads;
    return opt;
}

SolutionPair solve_on_mesh(const MeshPtr& mesh, const ProblemConfig& cfg, const AssemblyOptions& opt,
                           AssemblyReport* report) {
    AssemblyReport rep;
    const BlockSystem sys =
        assemble_system(*mesh, cfg.interior_context(), cfg.exterior_context(), cfg.source, opt, &rep);
    if (!rep.nonconverged.empty()) {
        const auto& r = rep.nonconverged.front();
        throw NumericalError("quadrature did not converge on " + std::to_string(rep.nonconverged.size()) +
                             " element pairs, first (" + std::to_string(r.m) + ", " + std::to_string(r.n) +
                             ") in medium " + std::to_string(r.medium));
    }
    if (report) report->merge(rep);
    const CVector x = lu_solve(sys.matrix, sys.rhs);
    SolutionPair sol{mesh, x.head(static_cast<Eigen::Index>(sys.m1)), x.tail(static_cast<Eigen::Index>(sys.m2))};
    return sol;
}

AdaptiveResult adaptive_solve(const ProblemConfig& cfg, unsigned threads, const LevelHook& hook) {
    cfg.validate();
    const AssemblyOptions opt = assembly_options(cfg, threads);
    AdaptiveResult result;
    result.coarse = build_initial_mesh(cfg.curve(), cfg.m0);
    for (int level = 0;; ++level) {
        const MeshPtr fine = uniform_refine(result.coarse);
        try {
            result.solution = solve_on_mesh(fine, cfg, opt);
        } catch (const NumericalError& e) {
            throw NumericalError("level " + std::to_string(level) + ": " + e.what());
        }
        const ErrorIndicators ind = local_indicators(result.solution, *result.coarse);
        LevelReport rep;
        rep.level = level;
        rep.M = result.coarse->node_count();
        rep.h_max = result.coarse->h_max();
        rep.h_min = result.coarse->h_min();
        rep.eta_tilde = ind.eta_tilde;
        const bool stop = level >= cfg.levels || (cfg.sigma > 0.0 && ind.eta_tilde < cfg.sigma);
        std::vector<std::size_t> marked;
        if (!stop) marked = dorfler_mark(ind, cfg.gamma);
        rep.marked = marked.size();
        if (hook) hook(result.solution, rep);
        result.reports.push_back(rep);
        if (stop || marked.empty()) break;
        result.coarse = bisect_elements(result.coarse, marked);
    }
    return result;
}

}  // namespace hbem
