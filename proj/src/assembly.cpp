#include "hbem/assembly.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "hbem/parallel.hpp"

namespace hbem {

void AssemblyReport::merge(const AssemblyReport& o) {
    pairs += o.pairs;
    adaptive_pairs += o.adaptive_pairs;
    evaluations += o.evaluations;
    nonconverged.insert(nonconverged.end(), o.nonconverged.begin(), o.nonconverged.end());
    records.insert(records.end(), o.records.begin(), o.records.end());
}

namespace {

constexpr std::array<int, 9> pair_groups{0, 1, 1, 0, 0, 0, 0, 2, 2};

// Integrand of pair_integrals before the Jacobian.
struct PairIntegrand {
    Vec2 base;  // midpoint_m - midpoint_n
    Vec2 tm;    // half-length tangent of m
    Vec2 tn;
    Vec2 num;
    Vec2 nun;
    double tiny;
    const KernelContext* ctx;

    PairIntegrand(const ElementFrame& em, const ElementFrame& en, const KernelContext& c)
        : base(em.midpoint - en.midpoint),
          tm(em.tangent * (0.5 * em.length)),
          tn(en.tangent * (0.5 * en.length)),
          num(em.normal),
          nun(en.normal),
          tiny(1e-13 * (em.length + en.length)),
          ctx(&c) {}

    PairValues operator()(double t, double s) const {
        const Vec2 d = base + tm * t - tn * s;
        if (std::abs(d.x) + std::abs(d.y) <= tiny) {
            // Shared corner of adjacent elements; a single point of measure zero.
            return {};
        }
        return at(d, t, s);
    }

    // d = x(t) - y(s) supplied by the caller, who may know it more accurately.
    PairValues at(Vec2 d, double t, double s) const {
        const KernelValues kv = kernel_values(d, *ctx);
        const double a0 = 0.5 * (1.0 - t);
        const double a1 = 0.5 * (1.0 + t);
        const double b0 = 0.5 * (1.0 - s);
        const double b1 = 0.5 * (1.0 + s);
        const cplx gn = kv.g * d.dot(nun);
        const cplx gm = -kv.g * d.dot(num);
        return {kv.phi,      gn * b0,         gn * b1,         kv.phi * (a0 * b0), kv.phi * (a0 * b1),
                kv.phi * (a1 * b0), kv.phi * (a1 * b1), gm * a0, gm * a1};
    }
};

PairValues tensor_gauss(const PairIntegrand& f, int qt, int qs, AdaptiveStats& st) {
    const QuadratureRule& rt = gauss_rule(qt);
    const QuadratureRule& rs = gauss_rule(qs);
    PairValues acc{};
    for (int i = 0; i < qt; ++i) {
        PairValues row{};
        for (int j = 0; j < qs; ++j) {
            const PairValues v = f(rt.nodes[i], rs.nodes[j]);
            for (std::size_t k = 0; k < v.size(); ++k) row[k] += rs.weights[j] * v[k];
        }
        for (std::size_t k = 0; k < row.size(); ++k) acc[k] += rt.weights[i] * row[k];
    }
    st.evaluations += static_cast<std::size_t>(qt) * qs;
    return acc;
}

}  // namespace

PairValues pair_integrals(const Mesh& mesh, std::size_t m, std::size_t n, const KernelContext& ctx,
                          const AssemblyOptions& opt, AdaptiveStats& st, PairPath* path) {
    const ElementFrame& em = mesh.element(m);
    const ElementFrame& en = mesh.element(n);
    PairValues out{};
    if (m == n) {
        const CoincidentSingleLayer c = coincident_single_layer(em, ctx);
        out[0] = c.constant;
        out[3] = c.p1[0][0];
        out[4] = c.p1[0][1];
        out[5] = c.p1[1][0];
        out[6] = c.p1[1][1];
        // The double-layer kernel vanishes on a flat element.
        if (path) *path = PairPath::coincident;
        return out;
    }
    const PairIntegrand f(em, en, ctx);
    const double jac = 0.25 * em.length * en.length;
    AdaptiveBudget budget = opt.budget;
    PairPath how = PairPath::smooth;
    if (elements_touch(mesh, m, n)) {
        budget.max_depth += opt.adjacent_extra_depth;
        // Duffy coordinates around the shared node: rho is the distance from
        // the corner in the max norm, w the ratio of the shorter leg. The
        // Jacobian rho cancels the 1/r of the double-layer kernel, and the
        // grading rho = 2 u^3 flattens the remaining rho log rho terms.
        const double tc = mesh.end_node(m) == n ? 1.0 : -1.0;
        const double sc = -tc;
        // Offsets from the corner are formed directly so that d carries no
        // cancellation.
        auto corner = [&](double dt, double ds) { return f.at(f.tm * dt - f.tn * ds, tc + dt, sc + ds); };
        auto g = [&](double a, double b) {
            const double u = 0.5 * (1.0 + a);
            const double rho = std::max(2.0 * u * u * u, 1e-100);
            const double w = 0.5 * (1.0 + b);
            PairValues v = corner(-tc * rho, -sc * rho * w);
            const PairValues v2 = corner(-tc * rho * w, -sc * rho);
            const double jf = 1.5 * rho * u * u;
            for (std::size_t k = 0; k < v.size(); ++k) v[k] = (v[k] + v2[k]) * jf;
            return v;
        };
        out = adaptive_lobatto_2d<9>(g, budget, st, pair_groups);
        for (auto& v : out) v *= jac;
        if (path) *path = PairPath::adjacent;
        return out;
    } else if (near_cone(em, en, cone_data(ctx.mat), opt.tau)) {
        how = PairPath::cone;
    } else {
        int qt = 0;
        int qs = 0;
        for (double xi : {-1.0, 0.0, 1.0}) {
            qs = std::max(qs, smooth_gauss_order(en, em.point(xi), ctx.mat, ctx.k0, opt.smooth_tol));
            qt = std::max(qt, smooth_gauss_order(em, en.point(xi), ctx.mat, ctx.k0, opt.smooth_tol));
        }
        if (std::max(qt, qs) <= opt.max_smooth_order) {
            out = tensor_gauss(f, qt, qs, st);
            for (auto& v : out) v *= jac;
            if (path) *path = PairPath::smooth;
            return out;
        }
        // Close approach without touching; treated like the cone case.
        how = PairPath::cone;
    }
    out = adaptive_lobatto_2d<9>(f, budget, st, pair_groups);
    for (auto& v : out) v *= jac;
    if (path) *path = how;
    return out;
}

OperatorBlocks assemble_medium(const Mesh& mesh, const KernelContext& ctx, const AssemblyOptions& opt,
                               AssemblyReport* report) {
    const std::size_t M = mesh.size();
    OperatorBlocks ops{CMatrix::Zero(M, M), CMatrix::Zero(M, M), CMatrix::Zero(M, M)};
    const cplx inv_product = 1.0 / ctx.mat.product();
    const double k2 = ctx.k0 * ctx.k0;
    const unsigned threads = resolve_threads(opt.threads);

    // Rows are computed in blocks (in parallel) and scattered serially in a
    // fixed order, so the result does not depend on the thread count.
    const std::size_t block = std::max<std::size_t>(1, std::min<std::size_t>(M, 64));
    std::vector<std::vector<PairValues>> rows(block);
    std::vector<AssemblyReport> row_reports(block);
    for (std::size_t m0 = 0; m0 < M; m0 += block) {
        const std::size_t count = std::min(block, M - m0);
        parallel_for(count, threads, [&](std::size_t r) {
            const std::size_t m = m0 + r;
            auto& out = rows[r];
            auto& rep = row_reports[r];
            rep = AssemblyReport{};
            out.resize(M - m);
            for (std::size_t n = m; n < M; ++n) {
                AdaptiveStats st;
                PairPath path;
                out[n - m] = pair_integrals(mesh, m, n, ctx, opt, st, &path);
                ++rep.pairs;
                rep.evaluations += st.evaluations;
                if (path == PairPath::adjacent || path == PairPath::cone) {
                    ++rep.adaptive_pairs;
                    const QuadratureRecord rec{m, n, 0, st.cells_used, st.converged};
                    if (!st.converged) rep.nonconverged.push_back(rec);
                    if (opt.record_pairs) rep.records.push_back(rec);
                }
            }
        });
        for (std::size_t r = 0; r < count; ++r) {
            const std::size_t m = m0 + r;
            const ElementFrame& em = mesh.element(m);
            const std::size_t node_m[2] = {m, mesh.end_node(m)};
            for (std::size_t n = m; n < M; ++n) {
                const PairValues& v = rows[r][n - m];
                const ElementFrame& en = mesh.element(n);
                const std::size_t node_n[2] = {n, mesh.end_node(n)};
                ops.S(m, n) += v[0];
                if (n != m) ops.S(n, m) += v[0];
                ops.K(m, node_n[0]) += v[1];
                ops.K(m, node_n[1]) += v[2];
                if (n != m) {
                    ops.K(n, node_m[0]) += v[7];
                    ops.K(n, node_m[1]) += v[8];
                }
                const cplx nn = em.normal.x * en.normal.x / ctx.mat.eps1() + em.normal.y * en.normal.y / ctx.mat.eps2();
                const double dm[2] = {-1.0 / em.length, 1.0 / em.length};
                const double dn[2] = {-1.0 / en.length, 1.0 / en.length};
                for (int i = 0; i < 2; ++i) {
                    for (int k = 0; k < 2; ++k) {
                        const cplx val = -inv_product * v[0] * (dm[i] * dn[k]) + k2 * v[3 + 2 * i + k] * nn;
                        ops.N(node_m[i], node_n[k]) += val;
                        if (n != m) ops.N(node_n[k], node_m[i]) += val;
                    }
                }
            }
            if (report) report->merge(row_reports[r]);
        }
    }
    return ops;
}

OperatorBlocks assemble_operators(const Mesh& mesh, const KernelContext& ctx1, const KernelContext& ctx2,
                                  const AssemblyOptions& opt, AssemblyReport* report) {
    const std::size_t M = mesh.size();
    if (ctx1.mat == ctx2.mat && ctx1.k0 == ctx2.k0) {
        // Both passes would be bit-identical; their difference is exactly zero.
        return {CMatrix::Zero(M, M), CMatrix::Zero(M, M), CMatrix::Zero(M, M)};
    }
    AssemblyReport r1;
    AssemblyReport r2;
    OperatorBlocks a = assemble_medium(mesh, ctx1, opt, &r1);
    const OperatorBlocks b = assemble_medium(mesh, ctx2, opt, &r2);
    for (auto& rec : r2.nonconverged) rec.medium = 1;
    for (auto& rec : r2.records) rec.medium = 1;
    if (report) {
        report->merge(r1);
        report->merge(r2);
    }
    a.S -= b.S;
    a.K -= b.K;
    a.N -= b.N;
    return a;
}

CMatrix assemble_S(const Mesh& mesh, const MaterialPair& mat1, const MaterialPair& mat2, double k0,
                   const AssemblyOptions& opt) {
    return assemble_operators(mesh, KernelContext(mat1, k0), KernelContext(mat2, k0), opt).S;
}

CMatrix assemble_K(const Mesh& mesh, const MaterialPair& mat1, const MaterialPair& mat2, double k0,
                   const AssemblyOptions& opt) {
    return assemble_operators(mesh, KernelContext(mat1, k0), KernelContext(mat2, k0), opt).K;
}

CMatrix assemble_N(const Mesh& mesh, const MaterialPair& mat1, const MaterialPair& mat2, double k0,
                   const AssemblyOptions& opt) {
    return assemble_operators(mesh, KernelContext(mat1, k0), KernelContext(mat2, k0), opt).N;
}

CMatrix assemble_I(const Mesh& mesh) {
    const std::size_t M = mesh.size();
    CMatrix I = CMatrix::Zero(M, M);
    for (std::size_t m = 0; m < M; ++m) {
        const double h = 0.5 * mesh.element(m).length;
        I(m, m) += h;
        I(m, mesh.end_node(m)) += h;
    }
    return I;
}

RhsVectors assemble_rhs(const Mesh& mesh, const PointSource& src, const KernelContext& interior,
                        const KernelContext& exterior, const AdaptiveBudget& budget) {
    const std::size_t M = mesh.size();
    RhsVectors out{CVector::Zero(M), CVector::Zero(M)};
    if (src.amplitude == cplx(0.0)) return out;
    const auto [dist, nearest] = mesh.distance(src.location);
    if (!(dist > 1e-12 * mesh.total_length())) {
        throw ValidationError("point source lies on the boundary (element " + std::to_string(nearest) + ")");
    }
    const KernelContext& ctx = src.domain == Domain::interior ? interior : exterior;
    for (std::size_t m = 0; m < M; ++m) {
        const ElementFrame& e = mesh.element(m);
        auto f = [&](double t) {
            const SourceData sd = source_data(e.point(t), e.normal, src, interior, exterior);
            return CVals<3>{sd.g2, sd.g1 * (0.5 * (1.0 - t)), sd.g1 * (0.5 * (1.0 + t))};
        };
        const int q = smooth_gauss_order(e, src.location, ctx.mat, ctx.k0, 1e-13);
        CVals<3> v{};
        if (q <= 24) {
            const QuadratureRule& r = gauss_rule(std::max(q, 4));
            for (std::size_t i = 0; i < r.nodes.size(); ++i) {
                const CVals<3> fi = f(r.nodes[i]);
                for (int k = 0; k < 3; ++k) v[k] += r.weights[i] * fi[k];
            }
        } else {
            AdaptiveStats st;
            v = adaptive_lobatto_1d<3>(f, -1.0, 1.0, budget, st, {0, 1, 1});
        }
        const double jac = 0.5 * e.length;
        out.g2(m) += jac * v[0];
        out.g1(m) += jac * v[1];
        out.g1(mesh.end_node(m)) += jac * v[2];
    }
    return out;
}

BlockSystem build_block_system(const OperatorBlocks& ops, const CMatrix& I, const RhsVectors& rhs) {
    const std::size_t m1 = ops.N.rows();
    const std::size_t m2 = ops.S.rows();
    auto check = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("block system dimension mismatch: ") + what);
    };
    check(ops.N.cols() == static_cast<Eigen::Index>(m1), "N");
    check(ops.S.cols() == static_cast<Eigen::Index>(m2), "S");
    check(ops.K.rows() == static_cast<Eigen::Index>(m2) && ops.K.cols() == static_cast<Eigen::Index>(m1), "K");
    check(I.rows() == static_cast<Eigen::Index>(m2) && I.cols() == static_cast<Eigen::Index>(m1), "I");
    check(rhs.g1.size() == static_cast<Eigen::Index>(m1) && rhs.g2.size() == static_cast<Eigen::Index>(m2), "rhs");
    BlockSystem sys;
    sys.m1 = m1;
    sys.m2 = m2;
    sys.matrix.resize(m1 + m2, m1 + m2);
    sys.matrix.topLeftCorner(m1, m1) = ops.N;
    sys.matrix.topRightCorner(m1, m2) = (I - ops.K).transpose();
    sys.matrix.bottomLeftCorner(m2, m1) = I + ops.K;
    sys.matrix.bottomRightCorner(m2, m2) = -ops.S;
    sys.rhs.resize(m1 + m2);
    sys.rhs.head(m1) = rhs.g1;
    sys.rhs.tail(m2) = rhs.g2;
    return sys;
}

BlockSystem assemble_system(const Mesh& mesh, const KernelContext& interior, const KernelContext& exterior,
                            const PointSource& src, const AssemblyOptions& opt, AssemblyReport* report) {
    const OperatorBlocks ops = assemble_operators(mesh, interior, exterior, opt, report);
    return build_block_system(ops, assemble_I(mesh), assemble_rhs(mesh, src, interior, exterior));
}

void write_matrix_binary(std::ostream& os, const CMatrix& a) {
    char header[24] = {'H', 'B', 'E', 'M'};
    const auto rows = static_cast<std::uint32_t>(a.rows());
    const auto cols = static_cast<std::uint32_t>(a.cols());
    std::memcpy(header + 4, &rows, 4);
    std::memcpy(header + 8, &cols, 4);
    os.write(header, sizeof header);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double v[2] = {a(i, j).real(), a(i, j).imag()};
            os.write(reinterpret_cast<const char*>(v), sizeof v);
        }
    }
}

CMatrix read_matrix_binary(std::istream& is) {
    char header[24];
    if (!is.read(header, sizeof header) || std::memcmp(header, "HBEM", 4) != 0) {
        throw std::runtime_error("not an HBEM matrix file");
    }
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::memcpy(&rows, header + 4, 4);
    std::memcpy(&cols, header + 8, 4);
    CMatrix a(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i) {
        for (std::uint32_t j = 0; j < cols; ++j) {
            double v[2];
            if (!is.read(reinterpret_cast<char*>(v), sizeof v)) throw std::runtime_error("truncated HBEM matrix file");
            a(i, j) = cplx(v[0], v[1]);
        }
    }
    return a;
}

}  // namespace hbem
