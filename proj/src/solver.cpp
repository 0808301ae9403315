#include "vhl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vhl {

void SolverConfig::validate() const {
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw std::invalid_argument("SolverConfig: rho must be positive");
    if (!(tol_rel > 0.0))
        throw std::invalid_argument("SolverConfig: tol_rel must be positive");
    if (max_iters < 1)
        throw std::invalid_argument("SolverConfig: max_iters must be at least 1");
    if (svt_rank_cap && *svt_rank_cap < 1)
        throw std::invalid_argument("SolverConfig: svt_rank_cap must be positive");
}

namespace {

VectorXd row_norms_squared(const SubspaceMatrix& B) {
    VectorXd nb = B.entries.rowwise().squaredNorm();
    for (Index j = 0; j < nb.size(); ++j)
        if (!(nb(j) > 0.0))
            throw std::invalid_argument("solve_vhl: row " + std::to_string(j) +
                                        " of B is zero, constraint b_j^* x_j = y_j is degenerate");
    return nb;
}

// Projects each column m_j onto the hyperplane b_j^* x = y_j.
void project_feasible(DataMatrix& M, const VectorXcd& y, const SubspaceMatrix& B, const VectorXd& nb) {
    for (Index j = 0; j < M.cols(); ++j) {
        const cd bm = B.entries.row(j).transpose().cwiseProduct(M.col(j)).sum();
        M.col(j) += ((y(j) - bm) / nb(j)) * B.entries.row(j).adjoint();
    }
}

} // namespace

DataMatrix least_norm_feasible(const VectorXcd& y, const SubspaceMatrix& B) {
    const VectorXd nb = row_norms_squared(B);
    DataMatrix X = DataMatrix::Zero(B.s(), y.size());
    project_feasible(X, y, B, nb);
    return X;
}

SolveReport solve_vhl(const VectorXcd& y, const SubspaceMatrix& B, const LiftShape& shape,
                      const SolverConfig& config) {
    config.validate();
    if (y.size() != shape.n || B.n() != shape.n || B.s() != shape.s)
        throw std::invalid_argument("solve_vhl: y, B and shape disagree on (n, s)");
    const VectorXd nb = row_norms_squared(B);
    const WeightVector w = hankel_weights(shape);
    const double rho = config.rho;

    SolveReport rep;
    DataMatrix X = DataMatrix::Zero(shape.s, shape.n);
    project_feasible(X, y, B, nb);

    if (shape.s == 1) {
        // One scalar constraint per column pins X down completely.
        rep.X_hat = std::move(X);
        rep.iters = 1;
        rep.converged = true;
        rep.nuclear_norm = nuclear_norm(vec_hankel(rep.X_hat, shape));
        if (config.record_history)
            rep.merit_history.push_back(0.0);
        return rep;
    }

    // Augmented Lagrangian with unscaled multiplier Lambda:
    //   ||Z||_* + <Lambda, Z - H(X)> + rho/2 ||Z - H(X)||_F^2,  s.t. A(X) = y.
    // X-step: minimize ||Z + Lambda/rho - H(X)||_F^2 over the affine set.
    //   H*H = D^2 is diagonal, so the unconstrained minimizer is
    //   D^{-2} H*(Z + Lambda/rho), followed by a per-column projection.
    // Z-step: Z = svt(H(X) - Lambda/rho, 1/rho).
    // Dual:   Lambda += rho (Z - H(X)).
    LiftedMatrix Z = vec_hankel(X, shape);
    LiftedMatrix Lambda = LiftedMatrix::Zero(shape.rows(), shape.cols());
    DataMatrix X_prev = X;
    LiftedMatrix HX;

    for (int it = 1; it <= config.max_iters; ++it) {
        X_prev = X;
        X = apply_D(vec_hankel_adjoint(Z + Lambda / rho, shape), w, -2);
        project_feasible(X, y, B, nb);

        HX = vec_hankel(X, shape);
        Z = svt(HX - Lambda / rho, 1.0 / rho, config.svt_rank_cap);
        Lambda += rho * (Z - HX);

        const double hx_norm = HX.norm();
        rep.primal_residual = (Z - HX).norm() / std::max(1.0, hx_norm);
        rep.dual_residual = rho * vec_hankel(X - X_prev, shape).norm() / std::max(1.0, Lambda.norm());
        rep.iters = it;
        if (config.record_history)
            rep.merit_history.push_back(std::max(rep.primal_residual, rep.dual_residual));
        if (rep.primal_residual <= config.tol_rel && rep.dual_residual <= config.tol_rel) {
            rep.converged = true;
            break;
        }
    }

    rep.X_hat = std::move(X);
    rep.nuclear_norm = nuclear_norm(vec_hankel(rep.X_hat, shape));
    return rep;
}

} // namespace vhl
