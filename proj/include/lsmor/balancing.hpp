#pragma once

#include "lsmor/state_space.hpp"

namespace lsmor {

// Coordinates in which reachability and observability Gramians coincide and
// are diagonal. Built from symmetric square roots P = K K^T, Q = L L^T and
// the SVD K^T L = V Sigma U^T, giving
//   T = Sigma^{-1/2} U^T L^T,   T^{-1} = K V Sigma^{-1/2},
// so that T P T^T = T^{-T} Q T^{-1} = Sigma.
struct BalancedRealization {
    StateSpaceSystem sys;   // original-coordinates system (kept for bound work)
    MatrixXd t_fwd;         // T
    MatrixXd t_inv;         // T^{-1}
    VectorXd hsv;           // descending, positive
    MatrixXd a_bal, b_bal, c_bal;

    Eigen::Index n() const { return a_bal.rows(); }

    // Partition blocks for a split index r (leading r states kept).
    MatrixXd a11(Eigen::Index r) const { return a_bal.topLeftCorner(r, r); }
    MatrixXd a12(Eigen::Index r) const { return a_bal.topRightCorner(r, n() - r); }
    MatrixXd a21(Eigen::Index r) const { return a_bal.bottomLeftCorner(n() - r, r); }
    MatrixXd a22(Eigen::Index r) const { return a_bal.bottomRightCorner(n() - r, n() - r); }
    MatrixXd b1(Eigen::Index r) const { return b_bal.topRows(r); }
    MatrixXd b2(Eigen::Index r) const { return b_bal.bottomRows(n() - r); }
    MatrixXd c1(Eigen::Index r) const { return c_bal.leftCols(r); }
    MatrixXd c2(Eigen::Index r) const { return c_bal.rightCols(n() - r); }
};

enum class ReductionMethod { BT, SPA };

const char* to_string(ReductionMethod method);

struct ReducedModel {
    StateSpaceSystem system;
    ReductionMethod method = ReductionMethod::BT;
    Eigen::Index r = 0;
    VectorXd parent_hsv_tail;  // sigma_{r+1}, ..., sigma_n
};

// Singular values of L^T K where p = K K^T and q = L L^T (symmetric square
// roots after PSD clipping); equivalently sqrt(eig(p q)). Descending.
VectorXd hankel_singular_values(const MatrixXd& p, const MatrixXd& q);

// Requires p, q positive definite (eigenvalues above the numerical rank
// threshold). Signs of the singular vector pairs are fixed deterministically
// so the transformation is reproducible.
BalancedRealization balance(const StateSpaceSystem& sys, const MatrixXd& p, const MatrixXd& q);

// Balanced truncation: (A_11, B_1, C_1). Requires 1 <= r < n and a relative
// HSV gap (sigma_r - sigma_{r+1}) / sigma_1 > 1e-10.
ReducedModel reduce_bt(const BalancedRealization& bal, Eigen::Index r);

// Singular perturbation approximation:
//   (A_11 - A_12 A_22^{-1} A_21, B_1, C_1 - C_2 A_22^{-1} A_21).
// Warns on stderr when cond(A_22) exceeds 1e12.
ReducedModel reduce_spa(const BalancedRealization& bal, Eigen::Index r);

// Restriction to the subspace that is both reachable and observable at the
// numerical rank threshold: directions whose singular value in the
// square-root product K^T L falls at or below rank_tol * sigma_1 are
// truncated. The restricted realization is balanced by construction, its
// Gramians are exactly the retained singular values, and directions with
// exactly zero weight leave the output map untouched.
struct MinimalProjection {
    StateSpaceSystem sys;
    MatrixXd p;            // = q = diag of the retained singular values
    MatrixXd q;
    MatrixXd restrict_map;  // n' x n
    MatrixXd extend_map;    // n x n'; restrict_map * extend_map = I
};

MinimalProjection project_minimal(const StateSpaceSystem& sys, const MatrixXd& p,
                                  const MatrixXd& q, double rank_tol);

}  // namespace lsmor
