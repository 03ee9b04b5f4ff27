#include "lsmor/balancing.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "lsmor/errors.hpp"

namespace lsmor {

namespace {

struct SqrtPair {
    MatrixXd root;      // symmetric PSD square root
    VectorXd eigvals;   // ascending, as returned by the symmetric solver
    MatrixXd eigvecs;
};

SqrtPair factor_psd(const MatrixXd& x, const char* who) {
    if (x.rows() != x.cols()) {
        throw DimensionMismatch(std::string(who) + ": Gramian must be square");
    }
    if (symmetry_defect(x) > 1e-8) {
        throw NotSymmetric(std::string(who) + ": Gramian is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (x + x.transpose()));
    if (es.info() != Eigen::Success) {
        throw EigFailure(std::string(who) + ": symmetric eigensolver failed");
    }
    VectorXd ev = es.eigenvalues();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 0.0);
    if (ev.minCoeff() < -1e-8 * scale) {
        throw NotPsd(std::string(who) + ": Gramian has eigenvalue " +
                     std::to_string(ev.minCoeff()) + " below -1e-8 * " +
                     std::to_string(scale));
    }
    ev = ev.cwiseMax(0.0);
    SqrtPair out;
    out.root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    out.eigvals = std::move(ev);
    out.eigvecs = es.eigenvectors();
    return out;
}

void require_pd(const VectorXd& eigvals, double rank_tol, const char* who, const char* which) {
    const double scale = eigvals.size() ? eigvals.maxCoeff() : 0.0;
    if (scale <= 0.0 || eigvals.minCoeff() <= rank_tol * scale) {
        throw NotPd(std::string(who) + ": " + which + " Gramian is not positive definite "
                    "at the numerical rank threshold (min/max eigenvalue ratio " +
                    std::to_string(eigvals.size() ? eigvals.minCoeff() / scale : 0.0) + ")");
    }
}

void check_split_index(const VectorXd& hsv, Eigen::Index r, const char* who) {
    const Eigen::Index n = hsv.size();
    if (r < 1 || r >= n) {
        throw BadOrder(std::string(who) + ": r must satisfy 1 <= r < n, got r=" +
                       std::to_string(r) + ", n=" + std::to_string(n));
    }
    const double gap = (hsv(r - 1) - hsv(r)) / hsv(0);
    if (!(gap > 1e-10)) {
        throw HsvTie(std::string(who) + ": Hankel singular values sigma_" + std::to_string(r) +
                     "=" + std::to_string(hsv(r - 1)) + " and sigma_" + std::to_string(r + 1) +
                     "=" + std::to_string(hsv(r)) + " are tied (relative gap " +
                     std::to_string(gap) + ")");
    }
}

}  // namespace

const char* to_string(ReductionMethod method) {
    return method == ReductionMethod::BT ? "bt" : "spa";
}

VectorXd hankel_singular_values(const MatrixXd& p, const MatrixXd& q) {
    if (p.rows() != q.rows() || p.cols() != q.cols()) {
        throw DimensionMismatch("hankel_singular_values: p and q must have equal size");
    }
    const SqrtPair kp = factor_psd(p, "hankel_singular_values");
    const SqrtPair lq = factor_psd(q, "hankel_singular_values");
    Eigen::BDCSVD<MatrixXd> svd(lq.root.transpose() * kp.root);
    return svd.singularValues();
}

BalancedRealization balance(const StateSpaceSystem& sys, const MatrixXd& p, const MatrixXd& q) {
    const Eigen::Index n = sys.n();
    if (p.rows() != n || q.rows() != n) {
        throw DimensionMismatch("balance: Gramians must match the system dimension");
    }
    const double rank_tol = default_rank_tol(n);
    const SqrtPair kp = factor_psd(p, "balance");
    const SqrtPair lq = factor_psd(q, "balance");
    require_pd(kp.eigvals, rank_tol, "balance", "reachability");
    require_pd(lq.eigvals, rank_tol, "balance", "observability");

    const MatrixXd& k = kp.root;
    const MatrixXd& l = lq.root;
    Eigen::BDCSVD<MatrixXd> svd(k.transpose() * l, Eigen::ComputeFullU | Eigen::ComputeFullV);
    VectorXd sigma = svd.singularValues();
    MatrixXd svd_u = svd.matrixU();  // K^T L = svd_u * Sigma * svd_v^T
    MatrixXd svd_v = svd.matrixV();

    if (sigma(sigma.size() - 1) < rank_tol * sigma(0)) {
        throw NearSingularHsv("balance: smallest Hankel singular value " +
                              std::to_string(sigma(sigma.size() - 1)) +
                              " is below rank tolerance relative to " +
                              std::to_string(sigma(0)));
    }

    // Deterministic sign convention: the dominant entry of each right singular
    // vector is made positive (paired flip keeps the factorization valid).
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::Index imax = 0;
        svd_v.col(j).cwiseAbs().maxCoeff(&imax);
        if (svd_v(imax, j) < 0.0) {
            svd_v.col(j) = -svd_v.col(j);
            svd_u.col(j) = -svd_u.col(j);
        }
    }

    const VectorXd inv_sqrt_sigma = sigma.cwiseSqrt().cwiseInverse();
    BalancedRealization bal;
    bal.sys = sys;
    bal.t_fwd = inv_sqrt_sigma.asDiagonal() * svd_v.transpose() * l.transpose();
    bal.t_inv = k * svd_u * inv_sqrt_sigma.asDiagonal();
    bal.hsv = std::move(sigma);
    bal.a_bal = bal.t_fwd * sys.a * bal.t_inv;
    bal.b_bal = bal.t_fwd * sys.b;
    bal.c_bal = sys.c * bal.t_inv;
    return bal;
}

ReducedModel reduce_bt(const BalancedRealization& bal, Eigen::Index r) {
    check_split_index(bal.hsv, r, "reduce_bt");
    ReducedModel rom;
    rom.system = StateSpaceSystem(bal.a11(r), bal.b1(r), bal.c1(r));
    rom.method = ReductionMethod::BT;
    rom.r = r;
    rom.parent_hsv_tail = bal.hsv.tail(bal.n() - r);
    return rom;
}

ReducedModel reduce_spa(const BalancedRealization& bal, Eigen::Index r) {
    check_split_index(bal.hsv, r, "reduce_spa");
    const MatrixXd a22 = bal.a22(r);
    Eigen::FullPivLU<MatrixXd> lu(a22);
    if (!lu.isInvertible()) {
        throw NotStable("reduce_spa: trailing block A_22 is singular");
    }
    const double rcond = lu.rcond();
    if (rcond > 0.0 && 1.0 / rcond > 1e12) {
        std::cerr << "reduce_spa: warning: cond(A_22) ~ " << 1.0 / rcond
                  << " exceeds 1e12; the correction terms may lose accuracy\n";
    }
    const MatrixXd a22inv_a21 = lu.solve(bal.a21(r));
    ReducedModel rom;
    rom.system = StateSpaceSystem(bal.a11(r) - bal.a12(r) * a22inv_a21, bal.b1(r),
                                  bal.c1(r) - bal.c2(r) * a22inv_a21);
    rom.method = ReductionMethod::SPA;
    rom.r = r;
    rom.parent_hsv_tail = bal.hsv.tail(bal.n() - r);
    return rom;
}

MinimalProjection project_minimal(const StateSpaceSystem& sys, const MatrixXd& p,
                                  const MatrixXd& q, double rank_tol) {
    const Eigen::Index n = sys.n();
    if (p.rows() != n || q.rows() != n) {
        throw DimensionMismatch("project_minimal: Gramians must match the system dimension");
    }

    MinimalProjection out;
    out.sys = sys;
    out.p = p;
    out.q = q;
    out.restrict_map = MatrixXd::Identity(n, n);
    out.extend_map = MatrixXd::Identity(n, n);
    if (n == 0) return out;

    const SqrtPair kp = factor_psd(p, "project_minimal");
    const SqrtPair lq = factor_psd(q, "project_minimal");
    Eigen::BDCSVD<MatrixXd> svd(kp.root.transpose() * lq.root,
                                Eigen::ComputeFullU | Eigen::ComputeFullV);
    const VectorXd& sigma = svd.singularValues();
    if (sigma(0) <= 0.0) {
        throw NotPd("project_minimal: no direction is both reachable and observable");
    }
    Eigen::Index kept = 0;
    while (kept < n && sigma(kept) > rank_tol * sigma(0)) ++kept;
    if (kept == n) return out;  // already minimal at this tolerance

    // T_r and its right inverse from the truncated square-root transform; the
    // restricted realization has both Gramians equal to diag(sigma_1..kept)
    // exactly (leading block of the balanced Lyapunov equations).
    const VectorXd inv_sqrt_sigma = sigma.head(kept).cwiseSqrt().cwiseInverse();
    out.restrict_map = inv_sqrt_sigma.asDiagonal() *
                       svd.matrixV().leftCols(kept).transpose() * lq.root.transpose();
    out.extend_map =
        kp.root * svd.matrixU().leftCols(kept) * inv_sqrt_sigma.asDiagonal();
    out.sys = StateSpaceSystem(out.restrict_map * sys.a * out.extend_map,
                               out.restrict_map * sys.b, sys.c * out.extend_map);
    out.p = MatrixXd(sigma.head(kept).asDiagonal());
    out.q = out.p;
    return out;
}

}  // namespace lsmor
