#pragma once

#include <optional>
#include <vector>

#include <Eigen/SVD>

#include "vhl/lift.hpp"
#include "vhl/model.hpp"
#include "vhl/types.hpp"

namespace vhl {

/// Soft-thresholds the singular values: U max(Sigma - threshold, 0) V^*.
/// When rank_cap is set only the rank_cap leading components are kept.
template <typename Derived>
Mat<typename Derived::Scalar> svt(const Eigen::MatrixBase<Derived>& M,
                                  typename Eigen::NumTraits<typename Derived::Scalar>::Real threshold,
                                  std::optional<Index> rank_cap = std::nullopt) {
    using Scalar = typename Derived::Scalar;
    if (!(threshold >= 0))
        throw std::invalid_argument("svt: threshold must be nonnegative");
    Eigen::BDCSVD<Mat<Scalar>> svd(M.eval(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw std::runtime_error("svt: SVD failed");
    const auto& sv = svd.singularValues();
    Index keep = 0;
    while (keep < sv.size() && sv(keep) > threshold)
        ++keep;
    if (rank_cap)
        keep = std::min(keep, *rank_cap);
    Mat<Scalar> out = Mat<Scalar>::Zero(M.rows(), M.cols());
    if (keep == 0)
        return out;
    const auto shrunk = (sv.head(keep).array() - threshold).matrix();
    out.noalias() = svd.matrixU().leftCols(keep) * shrunk.asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
    return out;
}

/// Sum of singular values.
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real nuclear_norm(const Eigen::MatrixBase<Derived>& Z) {
    if (Z.size() == 0)
        return 0;
    Eigen::BDCSVD<Mat<typename Derived::Scalar>> svd(Z.eval());
    return svd.singularValues().sum();
}

struct SolverConfig {
    double rho = 1.0;
    int max_iters = 5000;
    double tol_rel = 1e-7;
    std::optional<Index> svt_rank_cap;
    /// Keep max(primal, dual) for every iteration in SolveReport::merit_history.
    bool record_history = false;

    void validate() const;
};

struct SolveReport {
    DataMatrix X_hat;
    int iters = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double nuclear_norm = 0.0;
    bool converged = false;
    std::vector<double> merit_history;
};

/// Minimizes ||H(X)||_* subject to A(X) = y with ADMM on the splitting
/// Z = H(X). Every iterate satisfies A(X) = y exactly.
///
/// Throws std::invalid_argument on inconsistent dimensions or when some
/// row b_j^* of B vanishes. Running out of iterations is not an error:
/// the report comes back with converged = false.
SolveReport solve_vhl(const VectorXcd& y, const SubspaceMatrix& B, const LiftShape& shape,
                      const SolverConfig& config = {});

/// Minimum-norm X satisfying A(X) = y (column j is b_j y_j / ||b_j||^2).
DataMatrix least_norm_feasible(const VectorXcd& y, const SubspaceMatrix& B);

} // namespace vhl
