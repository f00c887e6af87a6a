#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace testutil {

// Brute-force reference for small box QPs with optional inequality rows
// C x >= d: enumerate every bound pattern (free / at-lower / at-upper per
// variable) and every subset of rows held as equalities, solve the resulting
// KKT system, and keep the feasible candidate with the lowest objective.
// The true minimizer's pattern is among those enumerated, and every other
// feasible candidate can only score worse, so the feasible minimum is the
// global solution.
struct BruteForceResult {
    Eigen::VectorXd x;
    double objective = std::numeric_limits<double>::infinity();
    bool found = false;
};

inline BruteForceResult brute_force_qp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                       const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                       const Eigen::MatrixXd& C = Eigen::MatrixXd(),
                                       const Eigen::VectorXd& d = Eigen::VectorXd()) {
    const int n = static_cast<int>(b.size());
    const int m = static_cast<int>(d.size());
    const double inf = std::numeric_limits<double>::infinity();
    BruteForceResult best;

    long n_patterns = 1;
    for (int i = 0; i < n; ++i) n_patterns *= 3;

    for (long code = 0; code < n_patterns; ++code) {
        long c = code;
        std::vector<int> state(n);  // 0 free, 1 lower, 2 upper
        bool valid = true;
        for (int i = 0; i < n; ++i, c /= 3) {
            state[i] = static_cast<int>(c % 3);
            if (state[i] == 1 && lo[i] == -inf) valid = false;
            if (state[i] == 2 && hi[i] == inf) valid = false;
        }
        if (!valid) continue;

        std::vector<int> free_idx;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) {
            if (state[i] == 0)
                free_idx.push_back(i);
            else
                x[i] = (state[i] == 1) ? lo[i] : hi[i];
        }
        const int nf = static_cast<int>(free_idx.size());

        for (long rows_code = 0; rows_code < (1L << m); ++rows_code) {
            std::vector<int> eq_rows;
            for (int r = 0; r < m; ++r)
                if (rows_code & (1L << r)) eq_rows.push_back(r);
            const int ne = static_cast<int>(eq_rows.size());
            if (ne > nf) continue;

            Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nf + ne, nf + ne);
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf + ne);
            for (int a = 0; a < nf; ++a) {
                for (int bb = 0; bb < nf; ++bb) K(a, bb) = A(free_idx[a], free_idx[bb]);
                double acc = b[free_idx[a]];
                for (int i = 0; i < n; ++i)
                    if (state[i] != 0) acc += A(free_idx[a], i) * x[i];
                rhs[a] = -acc;
            }
            for (int e = 0; e < ne; ++e) {
                const int r = eq_rows[e];
                for (int a = 0; a < nf; ++a) {
                    K(nf + e, a) = C(r, free_idx[a]);
                    K(a, nf + e) = C(r, free_idx[a]);
                }
                double acc = d[r];
                for (int i = 0; i < n; ++i)
                    if (state[i] != 0) acc -= C(r, i) * x[i];
                rhs[nf + e] = acc;
            }

            Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
            if (!lu.isInvertible()) continue;
            const Eigen::VectorXd sol = lu.solve(rhs);

            Eigen::VectorXd cand = x;
            bool feasible = true;
            for (int a = 0; a < nf; ++a) {
                cand[free_idx[a]] = sol[a];
                if (sol[a] < lo[free_idx[a]] - 1e-10 || sol[a] > hi[free_idx[a]] + 1e-10)
                    feasible = false;
            }
            if (m > 0) {
                const Eigen::VectorXd slack = C * cand - d;
                for (int r = 0; r < m; ++r)
                    if (slack[r] < -1e-10) feasible = false;
            }
            if (!feasible) continue;
            const double obj = 0.5 * cand.dot(A * cand) + b.dot(cand);
            if (obj < best.objective) {
                best.objective = obj;
                best.x = cand;
                best.found = true;
            }
            if (m == 0) break;  // row subsets are irrelevant without rows
        }
    }
    return best;
}

}  // namespace testutil
