#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "hbem/geometry.hpp"
#include "hbem/kernels.hpp"
#include "hbem/quadrature.hpp"

namespace hbem {

using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

// Unknown layout: P1 trace coefficients live on nodes, node m being the start
// of element m; P0 coefficients live on elements. On a closed curve both
// counts equal the element count.

struct AssemblyOptions {
    double tau = 0.1;
    AdaptiveBudget budget{};
    int adjacent_extra_depth = 4;
    double smooth_tol = 1e-11;  // target of the graded Gauss orders
    int max_smooth_order = 20;  // above this the pair goes adaptive
    unsigned threads = 0;       // 0: HBEM_THREADS or hardware
    bool record_pairs = false;
};

/// How a pair integral was computed, per medium.
enum class PairPath { coincident, adjacent, cone, smooth };

struct AssemblyReport {
    std::size_t pairs = 0;
    std::size_t adaptive_pairs = 0;
    std::size_t evaluations = 0;
    std::vector<QuadratureRecord> nonconverged;
    std::vector<QuadratureRecord> records;  // adaptive pairs, when requested

    void merge(const AssemblyReport& o);
};

/// Galerkin blocks of one medium (or of a difference of two media).
struct OperatorBlocks {
    CMatrix S;  // elements x elements, single layer
    CMatrix K;  // elements x nodes, double layer
    CMatrix N;  // nodes x nodes, hypersingular in weak form
};

/// Element-pair integrals over [-1,1]^2 including the Jacobian, for one
/// medium: [0] Phi, [1..2] K kernel against the trial hats of n, [3..6] Phi
/// against hat products a_i(t) b_k(s) (index 3 + 2i + k), [7..8] the K kernel
/// with the roles of m and n exchanged, against the hats of m.
using PairValues = CVals<9>;

PairValues pair_integrals(const Mesh& mesh, std::size_t m, std::size_t n, const KernelContext& ctx,
                          const AssemblyOptions& opt, AdaptiveStats& st, PairPath* path = nullptr);

OperatorBlocks assemble_medium(const Mesh& mesh, const KernelContext& ctx, const AssemblyOptions& opt = {},
                               AssemblyReport* report = nullptr);

/// Blocks of medium 1 minus blocks of medium 2.
OperatorBlocks assemble_operators(const Mesh& mesh, const KernelContext& ctx1, const KernelContext& ctx2,
                                  const AssemblyOptions& opt = {}, AssemblyReport* report = nullptr);

CMatrix assemble_S(const Mesh& mesh, const MaterialPair& mat1, const MaterialPair& mat2, double k0,
                   const AssemblyOptions& opt = {});
CMatrix assemble_K(const Mesh& mesh, const MaterialPair& mat1, const MaterialPair& mat2, double k0,
                   const AssemblyOptions& opt = {});
CMatrix assemble_N(const Mesh& mesh, const MaterialPair& mat1, const MaterialPair& mat2, double k0,
                   const AssemblyOptions& opt = {});

/// <hat_n, chi_m>: |E_m| / 2 at both end nodes of element m.
CMatrix assemble_I(const Mesh& mesh);

struct RhsVectors {
    CVector g1;  // tested with hats
    CVector g2;  // tested with element indicators
};

RhsVectors assemble_rhs(const Mesh& mesh, const PointSource& src, const KernelContext& interior,
                        const KernelContext& exterior, const AdaptiveBudget& budget = {1e-12, 0.0, 30});

struct BlockSystem {
    CMatrix matrix;
    CVector rhs;
    std::size_t m1 = 0;  // P1 block extent
    std::size_t m2 = 0;  // P0 block extent
};

/// [[N, I' - K'], [I + K, -S]] with I', K' the transposes of I, K.
BlockSystem build_block_system(const OperatorBlocks& ops, const CMatrix& I, const RhsVectors& rhs);

/// Everything for one mesh and problem: operators, identity, rhs.
BlockSystem assemble_system(const Mesh& mesh, const KernelContext& interior, const KernelContext& exterior,
                            const PointSource& src, const AssemblyOptions& opt = {},
                            AssemblyReport* report = nullptr);

/// Row-major complex doubles after a 24-byte header: "HBEM", u32 rows,
/// u32 cols, 12 reserved zero bytes.
void write_matrix_binary(std::ostream& os, const CMatrix& a);
CMatrix read_matrix_binary(std::istream& is);

}  // namespace hbem
