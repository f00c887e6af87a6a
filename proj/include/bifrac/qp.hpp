#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "bifrac/common.hpp"

namespace bifrac {

/// Box-constrained quadratic program
///   minimize  q(x) = 1/2 x'Ax + b'x   s.t.  lo <= x <= hi,  C x >= d,
/// with A sparse symmetric positive semidefinite on the feasible set.
/// lo/hi entries may be -inf/+inf. The coupled rows C x >= d carry the
/// Mosco constraints (one auxiliary variable per row plus a linear
/// combination of primary unknowns).
struct BoxQP {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
    Eigen::SparseMatrix<double, Eigen::RowMajor> C;  // 0 rows when absent
    Eigen::VectorXd d;

    int size() const { return static_cast<int>(b.size()); }
    bool has_rows() const { return C.rows() > 0; }
    double objective(const Eigen::VectorXd& x) const {
        return 0.5 * x.dot(A * x) + b.dot(x);
    }
};

struct QPSolution {
    Eigen::VectorXd x;
    double objective = 0.0;
    double kkt_residual = 0.0;  // projected-gradient norm (rows folded in)
    int iterations = 0;
    int active_set_size = 0;
    bool converged = false;
};

struct QPOptions {
    double tol_rel = 1e-8;   // relative to the initial projected-gradient norm
    double tol_abs = 0.0;    // extra absolute floor on the residual
    int max_iter = -1;       // default 20 x unknown count
    double gamma = 1.0;      // proportioning constant
    bool precondition = true;
    bool force_penalty_rows = false;  // skip the exact reduction (testing hook)
};

/// Solves the box QP by proportioning projected conjugate gradients.
/// Coupled rows are handled by exact elimination of their auxiliary
/// variables (active-set Newton on the reduced piecewise-quadratic) when the
/// rows have the Mosco structure, with a quadratic-penalty fallback
/// otherwise. Throws SolveError for an infeasible start or an indefinite
/// Hessian; an exhausted iteration budget returns the best iterate with
/// converged = false.
QPSolution solve_box_qp(const BoxQP& problem, const Eigen::VectorXd& x0, const QPOptions& opt = {});

}  // namespace bifrac
