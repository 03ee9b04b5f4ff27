#pragma once

#include "lsmor/balancing.hpp"
#include "lsmor/state_space.hpp"

namespace lsmor {

// Everything produced while evaluating the output-error bounds for one
// (method, r) pair. eps_general and eps_theorem are two algebraically equal
// routes to the same value and serve as a mutual cross-check.
struct BoundReport {
    double eps_general = 0.0;
    double eps_theorem = 0.0;
    ReductionMethod method = ReductionMethod::BT;
    Eigen::Index r = 0;
    MatrixXd p_g;      // n x r mixed Gramian, original coordinates
    MatrixXd p_g_rot;  // T * p_g; rows 0..r-1 = P_{g,1}, rows r..n-1 = P_{g,2}
};

// Solves A P_g + P_g A_r^T = -B q_m B_r^T for the cross Gramian between the
// full and reduced dynamics.
MatrixXd mixed_gramian(const StateSpaceSystem& full, const StateSpaceSystem& rom,
                       const MatrixXd& q_m);

// sqrt( tr(C P C^T) + tr(C_r P_r C_r^T) - 2 tr(C P_g C_r^T) ), the worst-case
// mean output error bound for any stable reduced model. A slightly negative
// radicand from rounding is clipped to zero; anything below the clip
// threshold throws NegativeRadicand.
double general_bound(const StateSpaceSystem& full, const StateSpaceSystem& rom,
                     const MatrixXd& q_m);

// sqrt( tr(Sigma_2 (B_2 q_m B_2^T + 2 P_{g,2} A_21^T)) ) with P_{g,2} the last
// n-r rows of T P_g. Equals general_bound for the BT reduced model.
double bt_bound(const BalancedRealization& bal, Eigen::Index r, const MatrixXd& q_m);

// sqrt( tr(Sigma_2 (B_2 q_m B_2^T
//                   - 2 (A_22 P_{g,2} + A_21 P_{g,1}) (A_22^{-1} A_21)^T)) ).
// Equals general_bound for the SPA reduced model.
double spa_bound(const BalancedRealization& bal, Eigen::Index r, const MatrixXd& q_m);

// Computes both routes plus the mixed Gramians for one configuration.
BoundReport bound_report(const BalancedRealization& bal, Eigen::Index r,
                         ReductionMethod method, const MatrixXd& q_m);

}  // namespace lsmor
