#include "lsmor/gramians.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <string>

#include "lsmor/errors.hpp"
#include "lsmor/lyapunov.hpp"

namespace lsmor {

namespace {

void check_noise_covariance(const MatrixXd& q_m, Eigen::Index m, const char* who) {
    if (q_m.rows() != m || q_m.cols() != m) {
        throw DimensionMismatch(std::string(who) + ": q_m must be " + std::to_string(m) +
                                "x" + std::to_string(m));
    }
    if (symmetry_defect(q_m) > 1e-10) {
        throw NotSymmetric(std::string(who) + ": q_m is not symmetric");
    }
    if (q_m.size() > 0) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(q_m);
        const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
            throw NotPsd(std::string(who) + ": q_m is not positive semidefinite");
        }
    }
}

// Numerical rank of the column space at threshold tol * sigma_max.
Eigen::Index numerical_rank(const MatrixXd& x, double tol) {
    if (x.size() == 0) return 0;
    Eigen::BDCSVD<MatrixXd> svd(x);
    const VectorXd& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol * sv(0)) ++rank;
    }
    return rank;
}

}  // namespace

MatrixXd reachability_gramian(const StateSpaceSystem& sys, const MatrixXd& q_m) {
    check_noise_covariance(q_m, sys.m(), "reachability_gramian");
    require_stable(sys.a, "reachability_gramian");
    const MatrixXd w = sys.b * q_m * sys.b.transpose();
    return solve_lyapunov(sys.a, w);
}

MatrixXd observability_gramian(const StateSpaceSystem& sys) {
    require_stable(sys.a, "observability_gramian");
    const MatrixXd w = sys.c.transpose() * sys.c;
    return solve_lyapunov(sys.a.transpose(), w);
}

GramianSet compute_gramians(const StateSpaceSystem& sys, const MatrixXd& q_m,
                            bool with_deterministic) {
    GramianSet set;
    set.p = reachability_gramian(sys, q_m);
    set.q = observability_gramian(sys);
    if (with_deterministic) {
        set.p_det = reachability_gramian(sys, MatrixXd::Identity(sys.m(), sys.m()));
    }
    return set;
}

FiniteTimeGramian finite_time_gramian(const StateSpaceSystem& sys, const MatrixXd& q_m,
                                      double t, int steps) {
    check_noise_covariance(q_m, sys.m(), "finite_time_gramian");
    if (t < 0.0) {
        throw InvalidSpec("finite_time_gramian: t must be nonnegative");
    }
    const Eigen::Index n = sys.n();
    if (t == 0.0) return {0.0, MatrixXd::Zero(n, n)};
    if (steps <= 0) {
        throw InvalidSpec("finite_time_gramian: steps must be positive");
    }
    const double h = t / steps;
    if (h * spectral_norm(sys.a) >= 0.1) {
        throw StepTooLarge("finite_time_gramian: h * ||A||_2 = " +
                           std::to_string(h * spectral_norm(sys.a)) + " >= 0.1");
    }

    const MatrixXd w = sys.b * q_m * sys.b.transpose();
    const auto rhs = [&](const MatrixXd& x) -> MatrixXd {
        MatrixXd ax = sys.a * x;
        return ax + ax.transpose() + w;
    };
    MatrixXd x = MatrixXd::Zero(n, n);
    for (int k = 0; k < steps; ++k) {
        const MatrixXd k1 = rhs(x);
        const MatrixXd k2 = rhs(x + 0.5 * h * k1);
        const MatrixXd k3 = rhs(x + 0.5 * h * k2);
        const MatrixXd k4 = rhs(x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    x = 0.5 * (x + x.transpose());
    return {t, std::move(x)};
}

ImageRelation image_relation(const MatrixXd& x, const MatrixXd& y, double rank_tol) {
    if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows()) {
        throw DimensionMismatch("image_relation: inputs must be square and equal size");
    }
    // Normalize each operand so the stacked rank test treats them on equal
    // footing regardless of scale.
    const double sx = spectral_norm(x);
    const double sy = spectral_norm(y);
    const MatrixXd xn = sx > 0.0 ? MatrixXd(x / sx) : x;
    const MatrixXd yn = sy > 0.0 ? MatrixXd(y / sy) : y;

    const Eigen::Index rx = numerical_rank(xn, rank_tol);
    const Eigen::Index ry = numerical_rank(yn, rank_tol);
    MatrixXd stacked(x.rows(), x.cols() + y.cols());
    stacked << xn, yn;
    const Eigen::Index rxy = numerical_rank(stacked, rank_tol);

    const bool x_in_y = (rxy == ry);
    const bool y_in_x = (rxy == rx);
    if (x_in_y && y_in_x) return ImageRelation::Equal;
    if (x_in_y) return ImageRelation::XSubsetY;
    if (y_in_x) return ImageRelation::YSubsetX;
    return ImageRelation::Incomparable;
}

const char* to_string(ImageRelation rel) {
    switch (rel) {
        case ImageRelation::Equal: return "equal";
        case ImageRelation::XSubsetY: return "x_subset_y";
        case ImageRelation::YSubsetX: return "y_subset_x";
        case ImageRelation::Incomparable: return "incomparable";
    }
    return "unknown";
}

}  // namespace lsmor
