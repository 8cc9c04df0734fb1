#include <cmath>
#include <sstream>
#include <utility>

#include "doctest.h"
#include "hbem/assembly.hpp"
#include "oracle/brute_pair.hpp"

using namespace hbem;
using oracle::brute_pair;
using oracle::pair_error;

namespace {

const MaterialPair hyperbolic{cplx(1, 0.02), cplx(-2, 0.02)};

MeshPtr circle(std::size_t M) {
    return build_initial_mesh(std::make_shared<const Curve>(Curve::ellipse(1.0, 1.0)), M);
}

double max_abs(const CMatrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("16-element circle pair integrals match brute force") {
    const MeshPtr mesh = circle(16);
    // A lossy hyperbolic medium keeps the cone near-singularity mild enough
    // for tensor Gauss; the low-loss medium is checked on chosen pairs below.
    const MaterialPair lossy{cplx(1, 0.5), cplx(-2, 0.5)};
    for (const MaterialPair& mat : {lossy, MaterialPair::isotropic(1.0)}) {
        const KernelContext ctx(mat, 1.0);
        AssemblyOptions opt;
        opt.budget.rel_tol = 1e-11;
        double worst = 0.0;
        for (std::size_t m = 0; m < 16; ++m) {
            for (std::size_t n = 0; n < 16; ++n) {
                // Touching pairs need the slow nested oracle; a few suffice.
                const bool sampled = (m == 0 && n == 0) || (m == 0 && n == 1) || (m == 15 && n == 0) ||
                                     (m == 8 && n == 7);
                if (elements_touch(*mesh, m, n) ? !sampled : n < m) continue;
                AdaptiveStats st;
                const PairValues v = pair_integrals(*mesh, m, n, ctx, opt, st);
                worst = std::max(worst, pair_error(v, brute_pair(*mesh, m, n, ctx, 6)));
            }
        }
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("low-loss hyperbolic pairs near the cone match brute force") {
    const MeshPtr mesh = circle(16);
    const KernelContext ctx(hyperbolic, 1.0);
    AssemblyOptions opt;
    opt.budget.rel_tol = 1e-11;
    opt.budget.max_depth = 20;
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{0, 2}, {0, 5}, {1, 6}, {2, 9}, {3, 12}, {4, 4}, {4, 5}}) {
        AdaptiveStats st;
        const PairValues v = pair_integrals(*mesh, m, n, ctx, opt, st);
        CHECK(st.converged);
        CHECK(pair_error(v, brute_pair(*mesh, m, n, ctx, 60)) <= 1e-8);
    }
}

TEST_CASE("blocks are scattered from the pair integrals") {
    const MeshPtr mesh = circle(10);
    const KernelContext ctx(hyperbolic, 1.3);
    AssemblyOptions opt;
    opt.threads = 1;
    opt.budget.rel_tol = 1e-12;
    const OperatorBlocks ops = assemble_medium(*mesh, ctx, opt);
    CMatrix S = CMatrix::Zero(10, 10), K = CMatrix::Zero(10, 10), N = CMatrix::Zero(10, 10);
    for (std::size_t m = 0; m < 10; ++m) {
        for (std::size_t n = 0; n < 10; ++n) {
            AdaptiveStats st;
            const PairValues v = pair_integrals(*mesh, m, n, ctx, opt, st);
            const ElementFrame& em = mesh->element(m);
            const ElementFrame& en = mesh->element(n);
            const std::size_t im[2] = {m, mesh->end_node(m)};
            const std::size_t in[2] = {n, mesh->end_node(n)};
            S(m, n) = v[0];
            K(m, in[0]) += v[1];
            K(m, in[1]) += v[2];
            // Weak hypersingular form: -(1/eps1 eps2) S-pairing of arc
            // derivatives plus k0^2 nu~-weighted single layer of hats.
            const cplx nn = em.normal.x * en.normal.x / ctx.mat.eps1() + em.normal.y * en.normal.y / ctx.mat.eps2();
            for (int i = 0; i < 2; ++i) {
                for (int k = 0; k < 2; ++k) {
                    const double dd = (i == 0 ? -1.0 : 1.0) * (k == 0 ? -1.0 : 1.0) / (em.length * en.length);
                    N(im[i], in[k]) += -v[0] * dd / ctx.mat.product() + ctx.k0 * ctx.k0 * v[3 + 2 * i + k] * nn;
                }
            }
        }
    }
    CHECK(max_abs(ops.S - S) <= 1e-9 * max_abs(S));
    CHECK(max_abs(ops.K - K) <= 1e-9 * max_abs(K));
    CHECK(max_abs(ops.N - N) <= 1e-9 * max_abs(N));
}

TEST_CASE("S and N are symmetric, K' assembled from the swapped kernel is K transposed") {
    const MeshPtr mesh = circle(24);
    const KernelContext ctx(hyperbolic, 1.5);
    const OperatorBlocks ops = assemble_medium(*mesh, ctx);
    CHECK(max_abs(ops.S - ops.S.transpose()) <= 1e-14 * max_abs(ops.S));
    CHECK(max_abs(ops.N - ops.N.transpose()) <= 1e-14 * max_abs(ops.N));
    // Entry (m, n) of K from the [7..8] slots of pair (n, m) equals the [1..2]
    // slots computed directly.
    AssemblyOptions opt;
    opt.budget.rel_tol = 1e-11;
    for (std::size_t m : {0u, 3u, 7u}) {
        for (std::size_t n : {5u, 12u, 20u}) {
            AdaptiveStats st;
            const PairValues direct = pair_integrals(*mesh, m, n, ctx, opt, st);
            const PairValues swapped = pair_integrals(*mesh, n, m, ctx, opt, st);
            CHECK(std::abs(direct[1] - swapped[7]) <= 1e-9 * std::abs(direct[1]) + 1e-14);
            CHECK(std::abs(direct[2] - swapped[8]) <= 1e-9 * std::abs(direct[2]) + 1e-14);
        }
    }
}

TEST_CASE("static double layer rows sum to -|E|/2") {
    const MeshPtr mesh = build_initial_mesh(std::make_shared<const Curve>(Curve::ellipse(2.0, 1.0)), 60);
    const KernelContext ctx(hyperbolic, 0.0);
    AssemblyOptions opt;
    opt.budget.rel_tol = 1e-10;
    const OperatorBlocks ops = assemble_medium(*mesh, ctx, opt);
    for (std::size_t m = 0; m < mesh->size(); ++m) {
        const cplx row = ops.K.row(static_cast<Eigen::Index>(m)).sum();
        CHECK(std::abs(row + 0.5 * mesh->element(m).length) <= 1e-7 * mesh->element(m).length);
    }
}

TEST_CASE("hypersingular weak form annihilates constants at k0 = 0") {
    const MeshPtr mesh = circle(20);
    const OperatorBlocks ops = assemble_medium(*mesh, KernelContext(hyperbolic, 0.0));
    const CVector ones = CVector::Ones(20);
    CHECK((ops.N * ones).cwiseAbs().maxCoeff() <= 1e-12 * max_abs(ops.N));
}

TEST_CASE("identical media give exactly zero operators") {
    const MeshPtr mesh = circle(12);
    const KernelContext a(hyperbolic, 1.0);
    const OperatorBlocks ops = assemble_operators(*mesh, a, a);
    CHECK(max_abs(ops.S) == 0.0);
    CHECK(max_abs(ops.K) == 0.0);
    CHECK(max_abs(ops.N) == 0.0);
}

TEST_CASE("assembly does not depend on the thread count") {
    const MeshPtr mesh = circle(70);
    const KernelContext in(hyperbolic, 1.0);
    const KernelContext out(MaterialPair::isotropic(1.0), 1.0);
    AssemblyOptions one;
    one.threads = 1;
    AssemblyOptions four;
    four.threads = 4;
    const OperatorBlocks a = assemble_operators(*mesh, in, out, one);
    const OperatorBlocks b = assemble_operators(*mesh, in, out, four);
    CHECK(a.S == b.S);
    CHECK(a.K == b.K);
    CHECK(a.N == b.N);
}

TEST_CASE("identity block") {
    const MeshPtr mesh = circle(8);
    const CMatrix I = assemble_I(*mesh);
    for (std::size_t m = 0; m < 8; ++m) {
        const double h = mesh->element(m).length;
        CHECK(I(m, m) == cplx(0.5 * h));
        CHECK(I(m, mesh->end_node(m)) == cplx(0.5 * h));
        CHECK(std::abs(I.row(m).sum() - h) < 1e-15);
    }
}

TEST_CASE("right-hand side against tanh-sinh") {
    const MeshPtr mesh = circle(16);
    const KernelContext in(hyperbolic, 1.0);
    const KernelContext out(MaterialPair::isotropic(1.0), 1.0);
    for (const PointSource src : {PointSource{{0.2, 0.1}, cplx(-1.0), Domain::interior},
                                  PointSource{{0.0, 1.05}, cplx(0.5, 2.0), Domain::exterior}}) {
        const RhsVectors r = assemble_rhs(*mesh, src, in, out);
        CVector g1 = CVector::Zero(16);
        CVector g2 = CVector::Zero(16);
        for (std::size_t m = 0; m < 16; ++m) {
            const ElementFrame& e = mesh->element(m);
            auto piece = [&](int which) {
                return oracle::tanh_sinh_1d(
                    [&](double t) -> oracle::cd {
                        const SourceData sd = source_data(e.point(t), e.normal, src, in, out);
                        if (which == 0) return sd.g2;
                        return sd.g1 * (which == 1 ? 0.5 * (1.0 - t) : 0.5 * (1.0 + t));
                    },
                    {-1.0, 1.0});
            };
            g2(m) += 0.5 * e.length * piece(0);
            g1(m) += 0.5 * e.length * piece(1);
            g1(mesh->end_node(m)) += 0.5 * e.length * piece(2);
        }
        CHECK((r.g1 - g1).cwiseAbs().maxCoeff() <= 1e-10 * g1.cwiseAbs().maxCoeff());
        CHECK((r.g2 - g2).cwiseAbs().maxCoeff() <= 1e-10 * g2.cwiseAbs().maxCoeff());
    }
    CHECK_THROWS_AS(assemble_rhs(*mesh, PointSource{mesh->element(3).start, 1.0, Domain::interior}, in, out),
                    ValidationError);
}

TEST_CASE("block layout") {
    OperatorBlocks ops{CMatrix::Constant(2, 2, 1.0), CMatrix::Constant(2, 2, 2.0), CMatrix::Constant(2, 2, 3.0)};
    CMatrix I = CMatrix::Identity(2, 2);
    const BlockSystem sys = build_block_system(ops, I, {CVector::Constant(2, 5.0), CVector::Constant(2, 7.0)});
    CHECK(sys.matrix(0, 0) == cplx(3.0));
    CHECK(sys.matrix(0, 2) == cplx(-1.0));  // I' - K'
    CHECK(sys.matrix(0, 3) == cplx(-2.0));
    CHECK(sys.matrix(2, 0) == cplx(3.0));   // I + K
    CHECK(sys.matrix(3, 3) == cplx(-1.0));  // -S
    CHECK(sys.rhs(1) == cplx(5.0));
    CHECK(sys.rhs(3) == cplx(7.0));
}

TEST_CASE("matrix dump round trip") {
    CMatrix a(3, 2);
    a << cplx(1, 2), cplx(-3, 0.5), cplx(1e-300, 0), cplx(0, -7), cplx(4, 4), cplx(5, -5);
    std::stringstream ss;
    write_matrix_binary(ss, a);
    const std::string bytes = ss.str();
    REQUIRE(bytes.size() == 24 + 6 * 16);
    CHECK(bytes.substr(0, 4) == "HBEM");
    const CMatrix b = read_matrix_binary(ss);
    CHECK(a == b);
    std::stringstream bad("XXXX");
    CHECK_THROWS(read_matrix_binary(bad));
}
