#pragma once

#include "bimanip/transform.hpp"

namespace bimanip {

enum class LpStatus { kFeasible, kInfeasible, kFailed };

// Feasibility of { A x = b, x >= 0 } via phase-1 simplex with Bland's rule.
// Feasible when the artificial objective reaches `tol` (residual bound).
// kFailed is returned only if the pivot cap is exhausted, which is distinct
// from a proven infeasibility.
LpStatus lp_equality_feasible(const MatX& a, const VecX& b, double tol = 1e-8);

}  // namespace bimanip
