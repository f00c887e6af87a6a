#include "bifrac/qp.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <limits>
#include <vector>

namespace bifrac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_abs_row_sum(const Eigen::SparseMatrix<double>& A) {
    Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(A.rows());
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
            row_sum[it.row()] += std::abs(it.value());
    return row_sum.size() ? row_sum.maxCoeff() : 0.0;
}

struct Gradients {
    Eigen::VectorXd free;     // gradient on strictly inactive components
    Eigen::VectorXd chopped;  // outward gradient on active components
};

Gradients split_gradient(const Eigen::VectorXd& g, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    const int n = static_cast<int>(x.size());
    Gradients out{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    for (int i = 0; i < n; ++i) {
        if (x[i] <= lo[i] && x[i] >= hi[i]) continue;  // fixed variable
        if (x[i] <= lo[i])
            out.chopped[i] = std::min(g[i], 0.0);
        else if (x[i] >= hi[i])
            out.chopped[i] = std::max(g[i], 0.0);
        else
            out.free[i] = g[i];
    }
    return out;
}

// largest step alpha >= 0 such that x - alpha*p stays in the box; also the
// limiting index so the caller can snap it onto its bound exactly
double max_feasible_step(const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int* limiting) {
    double alpha = kInf;
    *limiting = -1;
    for (int i = 0; i < x.size(); ++i) {
        double cand = kInf;
        if (p[i] > 0.0 && lo[i] > -kInf)
            cand = (x[i] - lo[i]) / p[i];
        else if (p[i] < 0.0 && hi[i] < kInf)
            cand = (x[i] - hi[i]) / p[i];
        if (cand < alpha) {
            alpha = cand;
            *limiting = i;
        }
    }
    return std::max(alpha, 0.0);
}

QPSolution mprgp(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                 const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, const Eigen::VectorXd& x0,
                 const QPOptions& opt) {
    const int n = static_cast<int>(b.size());
    QPSolution sol;
    if (n == 0) {
        sol.converged = true;
        return sol;
    }

    const double norm_scale = std::max(max_abs_row_sum(A), 1e-300);

    Eigen::VectorXd x = x0;
    for (int i = 0; i < n; ++i) {
        const double span = std::max({1.0, std::abs(x[i])});
        if (x[i] < lo[i] - 1e-12 * span || x[i] > hi[i] + 1e-12 * span)
            throw SolveError("box QP: infeasible starting point at component " + std::to_string(i));
        x[i] = std::min(std::max(x[i], lo[i]), hi[i]);
    }

    Eigen::VectorXd diag(n);
    for (int i = 0; i < n; ++i) {
        const double d = A.coeff(i, i);
        diag[i] = (opt.precondition && d > 0.0) ? d : 1.0;
    }

    const double alpha_bar = 1.0 / norm_scale;
    const int max_iter = opt.max_iter > 0 ? opt.max_iter : 20 * n;

    Eigen::VectorXd g = A * x + b;
    Gradients gr = split_gradient(g, x, lo, hi);
    const double gp0 = std::sqrt(gr.free.squaredNorm() + gr.chopped.squaredNorm());
    const double tol = std::max(opt.tol_rel * gp0, opt.tol_abs);

    auto preconditioned = [&](const Eigen::VectorXd& phi) { return phi.cwiseQuotient(diag); };

    Eigen::VectorXd z = preconditioned(gr.free);
    Eigen::VectorXd p = z;
    double rtz = gr.free.dot(z);

    int it = 0;
    for (; it < max_iter; ++it) {
        const double gp_norm = std::sqrt(gr.free.squaredNorm() + gr.chopped.squaredNorm());
        if (gp_norm <= tol) {
            sol.converged = true;
            break;
        }
        if (gr.chopped.squaredNorm() <= opt.gamma * opt.gamma * gr.free.squaredNorm()) {
            // conjugate-gradient step on the current face
            if (p.squaredNorm() == 0.0) {
                z = preconditioned(gr.free);
                p = z;
                rtz = gr.free.dot(z);
                if (p.squaredNorm() == 0.0) {
                    sol.converged = gp_norm <= tol;
                    break;
                }
            }
            const Eigen::VectorXd Ap = A * p;
            const double pAp = p.dot(Ap);
            int limiting = -1;
            const double alpha_f = max_feasible_step(x, p, lo, hi, &limiting);
            if (pAp <= 0.0) {
                if (pAp < -1e-12 * norm_scale * p.squaredNorm())
                    throw SolveError("box QP: negative curvature direction encountered");
                if (!(alpha_f < kInf))
                    throw SolveError("box QP: unbounded below along a zero-curvature direction");
                x -= alpha_f * p;
                if (limiting >= 0) x[limiting] = (p[limiting] > 0.0) ? lo[limiting] : hi[limiting];
                g = A * x + b;
                gr = split_gradient(g, x, lo, hi);
                z = preconditioned(gr.free);
                p = z;
                rtz = gr.free.dot(z);
                continue;
            }
            const double alpha_cg = rtz / pAp;
            if (alpha_cg <= alpha_f) {
                x -= alpha_cg * p;
                g -= alpha_cg * Ap;
                gr = split_gradient(g, x, lo, hi);
                z = preconditioned(gr.free);
                const double rtz_new = gr.free.dot(z);
                const double beta = preconditioned(gr.free).dot(Ap) / pAp;
                p = z - beta * p;
                rtz = rtz_new;
            } else {
                // hit the boundary, then expand the active set
                x -= alpha_f * p;
                if (limiting >= 0) x[limiting] = (p[limiting] > 0.0) ? lo[limiting] : hi[limiting];
                g -= alpha_f * Ap;
                gr = split_gradient(g, x, lo, hi);
                x -= alpha_bar * gr.free;
                for (int i = 0; i < n; ++i) x[i] = std::min(std::max(x[i], lo[i]), hi[i]);
                g = A * x + b;
                gr = split_gradient(g, x, lo, hi);
                z = preconditioned(gr.free);
                p = z;
                rtz = gr.free.dot(z);
            }
        } else {
            // proportioning step along the chopped gradient
            const Eigen::VectorXd dir = gr.chopped;
            const Eigen::VectorXd Ad = A * dir;
            const double dAd = dir.dot(Ad);
            int limiting = -1;
            const double alpha_f = max_feasible_step(x, dir, lo, hi, &limiting);
            double alpha;
            if (dAd <= 0.0) {
                if (dAd < -1e-12 * norm_scale * dir.squaredNorm())
                    throw SolveError("box QP: negative curvature direction encountered");
                if (!(alpha_f < kInf))
                    throw SolveError("box QP: unbounded below along a zero-curvature direction");
                alpha = alpha_f;
            } else {
                alpha = std::min(g.dot(dir) / dAd, alpha_f);
            }
            x -= alpha * dir;
            if (alpha == alpha_f && limiting >= 0)
                x[limiting] = (dir[limiting] > 0.0) ? lo[limiting] : hi[limiting];
            g -= alpha * Ad;
            gr = split_gradient(g, x, lo, hi);
            z = preconditioned(gr.free);
            p = z;
            rtz = gr.free.dot(z);
        }
    }

    sol.x = x;
    sol.objective = 0.5 * x.dot(A * x) + b.dot(x);
    sol.kkt_residual = std::sqrt(gr.free.squaredNorm() + gr.chopped.squaredNorm());
    sol.iterations = it;
    for (int i = 0; i < n; ++i)
        if (x[i] <= lo[i] || x[i] >= hi[i]) ++sol.active_set_size;
    return sol;
}

// ---------------------------------------------------------------------------
// Coupled rows: exact elimination of the auxiliary variables.
//
// A row with the Mosco structure reads  aux + c'y >= d  where the auxiliary
// variable is bounded below by zero, absent from b and the other rows, and
// carries a single (diagonal) entry q in A. Minimizing over the auxiliary
// alone gives aux = max(0, d - c'y), so the remaining problem in the primary
// variables y is the smooth convex piecewise quadratic
//   F(y) = 1/2 y'Ayy y + by'y + sum_r 1/2 q_r max(0, d_r - c_r'y)^2,
// solved by active-set Newton with an exact piecewise line search.
// ---------------------------------------------------------------------------

struct RowStructure {
    bool ok = false;
    std::vector<int> aux_of_row;    // auxiliary column per row
    std::vector<int> primary;       // primary columns (reduced unknowns)
    std::vector<int> reduced_index; // column -> reduced index or -1
    std::vector<double> q;          // diagonal weight of each auxiliary
    std::vector<std::vector<std::pair<int, double>>> row_coeffs;  // (reduced index, coeff)
    Eigen::VectorXd d;
};

RowStructure analyze_rows(const BoxQP& qp) {
    RowStructure rs;
    const int n = qp.size();
    const int m = static_cast<int>(qp.C.rows());
    std::vector<int> aux_count(n, 0);
    std::vector<int> col_nnz(n, 0);
    for (int k = 0; k < qp.A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(qp.A, k); it; ++it)
            if (it.value() != 0.0) ++col_nnz[it.col()];

    rs.aux_of_row.assign(m, -1);
    for (int r = 0; r < m; ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(qp.C, r); it; ++it) {
            const int j = static_cast<int>(it.col());
            if (it.value() == 1.0 && qp.lo[j] == 0.0 && qp.hi[j] == kInf && qp.b[j] == 0.0 &&
                col_nnz[j] == 1 && qp.A.coeff(j, j) > 0.0 && aux_count[j] == 0) {
                rs.aux_of_row[r] = j;
                break;
            }
        }
        if (rs.aux_of_row[r] < 0) return rs;
        ++aux_count[rs.aux_of_row[r]];
    }

    std::vector<char> is_aux(n, 0);
    for (const int j : rs.aux_of_row) is_aux[j] = 1;
    rs.reduced_index.assign(n, -1);
    for (int j = 0; j < n; ++j) {
        if (is_aux[j]) continue;
        // the reduction ignores box bounds on primary unknowns
        if (qp.lo[j] != -kInf || qp.hi[j] != kInf) return rs;
        rs.reduced_index[j] = static_cast<int>(rs.primary.size());
        rs.primary.push_back(j);
    }
    rs.q.resize(m);
    rs.row_coeffs.resize(m);
    for (int r = 0; r < m; ++r) {
        rs.q[r] = qp.A.coeff(rs.aux_of_row[r], rs.aux_of_row[r]);
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(qp.C, r); it; ++it) {
            const int j = static_cast<int>(it.col());
            if (j == rs.aux_of_row[r]) continue;
            if (is_aux[j]) return rs;  // auxiliary shared across rows
            rs.row_coeffs[r].push_back({rs.reduced_index[j], it.value()});
        }
    }
    rs.d = qp.d;
    rs.ok = true;
    return rs;
}

QPSolution solve_reduced_rows(const BoxQP& qp, const RowStructure& rs, const Eigen::VectorXd& x0,
                              const QPOptions& opt) {
    const int ny = static_cast<int>(rs.primary.size());
    const int m = static_cast<int>(rs.d.size());

    Eigen::SparseMatrix<double> Ayy(ny, ny);
    {
        std::vector<Eigen::Triplet<double>> trips;
        for (int k = 0; k < qp.A.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(qp.A, k); it; ++it) {
                const int i = rs.reduced_index[it.row()];
                const int j = rs.reduced_index[it.col()];
                if (i >= 0 && j >= 0 && it.value() != 0.0) trips.push_back({i, j, it.value()});
            }
        Ayy.setFromTriplets(trips.begin(), trips.end());
    }
    Eigen::VectorXd by(ny);
    Eigen::VectorXd y(ny);
    for (int j = 0; j < ny; ++j) {
        by[j] = qp.b[rs.primary[j]];
        y[j] = x0[rs.primary[j]];
    }

    auto row_value = [&](int r, const Eigen::VectorXd& yy) {
        double s = 0.0;
        for (const auto& [j, c] : rs.row_coeffs[r]) s += c * yy[j];
        return s;
    };
    auto gradient = [&](const Eigen::VectorXd& yy) {
        Eigen::VectorXd g = Ayy * yy + by;
        for (int r = 0; r < m; ++r) {
            const double slack = rs.d[r] - row_value(r, yy);
            if (slack > 0.0)
                for (const auto& [j, c] : rs.row_coeffs[r]) g[j] -= rs.q[r] * slack * c;
        }
        return g;
    };

    Eigen::VectorXd grad = gradient(y);
    const double g0 = grad.norm();
    const double tol = std::max(opt.tol_rel * g0, opt.tol_abs);

    QPSolution sol;
    int it = 0;
    const int max_newton = 200;
    for (; it < max_newton; ++it) {
        if (grad.norm() <= tol) {
            sol.converged = true;
            break;
        }
        std::vector<Eigen::Triplet<double>> trips;
        for (int k = 0; k < Ayy.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator itA(Ayy, k); itA; ++itA)
                trips.push_back(
                    {static_cast<int>(itA.row()), static_cast<int>(itA.col()), itA.value()});
        for (int r = 0; r < m; ++r) {
            if (rs.d[r] - row_value(r, y) <= 0.0) continue;
            for (const auto& [j1, c1] : rs.row_coeffs[r])
                for (const auto& [j2, c2] : rs.row_coeffs[r])
                    trips.push_back({j1, j2, rs.q[r] * c1 * c2});
        }
        Eigen::SparseMatrix<double> G(ny, ny);
        G.setFromTriplets(trips.begin(), trips.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(G);
        if (ldlt.info() != Eigen::Success)
            throw SolveError("coupled-row QP: Newton system factorization failed");
        const Eigen::VectorXd delta = ldlt.solve(-grad);

        // exact line search on the piecewise quadratic along delta:
        // phi(t) = d/dt F(y + t delta) is continuous increasing with phi(0) < 0
        const double a0 = delta.dot(Ayy * y + by);
        const double a1 = delta.dot(Ayy * delta);
        std::vector<double> s_r(m), u_r(m);
        std::vector<double> breaks;
        for (int r = 0; r < m; ++r) {
            s_r[r] = row_value(r, y);
            u_r[r] = 0.0;
            for (const auto& [j, c] : rs.row_coeffs[r]) u_r[r] += c * delta[j];
            if (u_r[r] != 0.0) {
                const double t = (rs.d[r] - s_r[r]) / u_r[r];
                if (t > 0.0) breaks.push_back(t);
            }
        }
        std::sort(breaks.begin(), breaks.end());
        auto phi_coeffs = [&](double t_probe, double* c0, double* c1) {
            *c0 = a0;
            *c1 = a1;
            for (int r = 0; r < m; ++r) {
                const double slack = rs.d[r] - s_r[r] - t_probe * u_r[r];
                if (slack > 0.0) {
                    *c0 -= rs.q[r] * (rs.d[r] - s_r[r]) * u_r[r];
                    *c1 += rs.q[r] * u_r[r] * u_r[r];
                }
            }
        };
        double t_star = -1.0;
        double seg_lo = 0.0;
        for (size_t bidx = 0; bidx <= breaks.size(); ++bidx) {
            const double seg_hi = (bidx < breaks.size()) ? breaks[bidx] : kInf;
            const double probe = (seg_hi < kInf) ? 0.5 * (seg_lo + seg_hi) : seg_lo + 1.0;
            double c0, c1;
            phi_coeffs(probe, &c0, &c1);
            if (c1 > 0.0) {
                const double t_root = -c0 / c1;
                if (t_root >= seg_lo - 1e-14 && (t_root <= seg_hi || seg_hi == kInf)) {
                    t_star = std::max(t_root, 0.0);
                    break;
                }
            }
            if (seg_hi == kInf) break;
            seg_lo = seg_hi;
        }
        if (t_star < 0.0)
            throw SolveError("coupled-row QP: line search failed (objective unbounded)");
        y += t_star * delta;
        grad = gradient(y);
    }

    Eigen::VectorXd x = x0;
    for (int j = 0; j < ny; ++j) x[rs.primary[j]] = y[j];
    for (int r = 0; r < m; ++r) x[rs.aux_of_row[r]] = std::max(0.0, rs.d[r] - row_value(r, y));
    sol.x = x;
    sol.objective = qp.objective(x);
    sol.kkt_residual = grad.norm();
    sol.iterations = it;
    for (int r = 0; r < m; ++r)
        if (x[rs.aux_of_row[r]] == 0.0 || rs.d[r] - row_value(r, y) >= 0.0) ++sol.active_set_size;
    return sol;
}

// quadratic-penalty fallback for rows without the Mosco structure
QPSolution solve_penalty_rows(const BoxQP& qp, const Eigen::VectorXd& x0, const QPOptions& opt) {
    const int m = static_cast<int>(qp.C.rows());
    const double rho = 1e4 * std::max(max_abs_row_sum(qp.A), 1.0);

    Eigen::VectorXd x = x0;
    QPSolution sol;
    std::vector<char> active(m, 1), prev_active(m, 0);
    for (int outer = 0; outer < 30; ++outer) {
        std::vector<Eigen::Triplet<double>> trips;
        for (int k = 0; k < qp.A.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(qp.A, k); it; ++it)
                trips.push_back(
                    {static_cast<int>(it.row()), static_cast<int>(it.col()), it.value()});
        Eigen::VectorXd b = qp.b;
        for (int r = 0; r < m; ++r) {
            if (!active[r]) continue;
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator i1(qp.C, r); i1; ++i1) {
                b[i1.col()] -= rho * qp.d[r] * i1.value();
                for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator i2(qp.C, r); i2;
                     ++i2)
                    trips.push_back({static_cast<int>(i1.col()), static_cast<int>(i2.col()),
                                     rho * i1.value() * i2.value()});
            }
        }
        Eigen::SparseMatrix<double> Apen(qp.size(), qp.size());
        Apen.setFromTriplets(trips.begin(), trips.end());
        sol = mprgp(Apen, b, qp.lo, qp.hi, x, opt);
        x = sol.x;
        prev_active = active;
        const Eigen::VectorXd slack = qp.C * x - qp.d;
        for (int r = 0; r < m; ++r) active[r] = slack[r] < 0.0;
        if (active == prev_active && sol.converged) break;
    }
    sol.objective = qp.objective(x);
    return sol;
}

}  // namespace

QPSolution solve_box_qp(const BoxQP& problem, const Eigen::VectorXd& x0, const QPOptions& opt) {
    if (problem.b.size() != problem.A.rows() || problem.A.rows() != problem.A.cols())
        throw SolveError("box QP: inconsistent dimensions");
    if (!problem.has_rows()) return mprgp(problem.A, problem.b, problem.lo, problem.hi, x0, opt);
    if (!opt.force_penalty_rows) {
        const RowStructure rs = analyze_rows(problem);
        if (rs.ok) {
            QPSolution sol = solve_reduced_rows(problem, rs, x0, opt);
            if (sol.converged) return sol;
        }
    }
    return solve_penalty_rows(problem, x0, opt);
}

}  // namespace bifrac
