#include "hbem/linalg.hpp"

#include <Eigen/LU>
#include <limits>
#include <stdexcept>
#include <string>

namespace hbem {

CVector lu_solve(const CMatrix& a, const CVector& b, SolveReport* report) {
    if (a.rows() != a.cols()) throw std::invalid_argument("lu_solve: matrix is not square");
    if (b.size() != a.rows()) throw std::invalid_argument("lu_solve: right-hand side size mismatch");
    const Eigen::Index n = a.rows();
    if (n == 0) return CVector();
    const double norm_a = a.cwiseAbs().rowwise().sum().maxCoeff();
    const Eigen::PartialPivLU<CMatrix> lu(a);
    const auto& u = lu.matrixLU();
    const double floor = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * norm_a;
    double min_pivot = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = std::abs(u(i, i));
        if (!(p > floor)) {
            throw NumericalError("singular matrix: pivot " + std::to_string(i) + " of " + std::to_string(n) +
                                 " is " + std::to_string(p) + " (threshold " + std::to_string(floor) + ")");
        }
        min_pivot = std::min(min_pivot, p);
    }
    CVector x = lu.solve(b);
    if (report) {
        const double norm_x = x.cwiseAbs().maxCoeff();
        const double res = (a * x - b).cwiseAbs().maxCoeff();
        report->residual = norm_x > 0.0 ? res / (norm_a * norm_x) : res;
        report->growth = u.triangularView<Eigen::Upper>().toDenseMatrix().cwiseAbs().maxCoeff() / a.cwiseAbs().maxCoeff();
        report->min_pivot = min_pivot / norm_a;
    }
    return x;
}

}  // namespace hbem
