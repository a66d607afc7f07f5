#include "bimanip/lp.hpp"

#include <cmath>
#include <vector>

namespace bimanip {

LpStatus lp_equality_feasible(const MatX& a, const VecX& b, double tol) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());

    // Tableau [A | I | b] with rows flipped so b >= 0; artificials form the
    // starting basis. Minimize the sum of artificials.
    MatX t(m, n + m + 1);
    for (int i = 0; i < m; ++i) {
        const double s = b[i] < 0.0 ? -1.0 : 1.0;
        t.block(i, 0, 1, n) = s * a.row(i);
        t(i, n + m) = s * b[i];
    }
    t.block(0, n, m, m) = MatX::Identity(m, m);

    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    // Phase-1 reduced costs c_j - z_j with c = (0..0, 1..1) are recomputed
    // from the tableau every iteration: z_j sums the rows whose basic
    // variable is artificial. Degenerate grasp-wrench problems take many
    // pivots, and an incrementally updated cost row drifts enough to stop
    // at non-optimal vertices.
    VecX cost(n + m);
    const int max_pivots = 200 * (n + m);
    bool optimal = false;
    for (int iter = 0; iter < max_pivots; ++iter) {
        cost.setZero();
        cost.tail(m).setOnes();
        for (int i = 0; i < m; ++i)
            if (basis[i] >= n) cost -= t.row(i).head(n + m).transpose();
        // Bland's rule: first improving column.
        int col = -1;
        for (int j = 0; j < n + m; ++j) {
            if (cost[j] < -1e-9) {
                col = j;
                break;
            }
        }
        if (col < 0) {
            optimal = true;
            break;
        }
        int row = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < m; ++i) {
            if (t(i, col) > 1e-12) {
                const double ratio = t(i, n + m) / t(i, col);
                if (row < 0 || ratio < best_ratio - 1e-15 ||
                    (std::abs(ratio - best_ratio) <= 1e-15 && basis[i] < basis[row])) {
                    row = i;
                    best_ratio = ratio;
                }
            }
        }
        if (row < 0) return LpStatus::kFailed;  // unbounded phase 1: numerical trouble
        // Pivot.
        t.row(row) /= t(row, col);
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            const double f = t(i, col);
            if (f != 0.0) t.row(i) -= f * t.row(row);
        }
        const double f2 = cost[col];
        cost -= f2 * t.row(row).head(n + m).transpose();
        basis[row] = col;
    }

    double artificial_sum = 0.0;
    for (int i = 0; i < m; ++i)
        if (basis[i] >= n) artificial_sum += t(i, n + m);
    if (artificial_sum <= tol) return LpStatus::kFeasible;
    return optimal ? LpStatus::kInfeasible : LpStatus::kFailed;
}

}  // namespace bimanip
