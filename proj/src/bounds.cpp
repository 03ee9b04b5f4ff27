#include "lsmor/bounds.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>

#include "lsmor/errors.hpp"
#include "lsmor/gramians.hpp"
#include "lsmor/lyapunov.hpp"

namespace lsmor {

namespace {

double clipped_sqrt(double radicand, double scale, const char* who) {
    if (radicand < 0.0) {
        if (radicand < -1e-10 * (scale + 1.0)) {
            throw NegativeRadicand(std::string(who) + ": radicand " +
                                   std::to_string(radicand) +
                                   " is negative beyond the rounding threshold");
        }
        return 0.0;
    }
    return std::sqrt(radicand);
}

struct TheoremIngredients {
    ReducedModel rom;
    MatrixXd p_g;      // original coordinates
    MatrixXd p_g_rot;  // T * p_g
};

TheoremIngredients prepare(const BalancedRealization& bal, Eigen::Index r,
                           ReductionMethod method, const MatrixXd& q_m) {
    TheoremIngredients ing;
    ing.rom = method == ReductionMethod::BT ? reduce_bt(bal, r) : reduce_spa(bal, r);
    ing.p_g = mixed_gramian(bal.sys, ing.rom.system, q_m);
    ing.p_g_rot = bal.t_fwd * ing.p_g;
    return ing;
}

double theorem_bound(const BalancedRealization& bal, Eigen::Index r, ReductionMethod method,
                     const MatrixXd& q_m, const TheoremIngredients& ing) {
    const Eigen::Index n = bal.n();
    const VectorXd sigma2 = bal.hsv.tail(n - r);
    const MatrixXd b2 = bal.b2(r);
    const MatrixXd pg1 = ing.p_g_rot.topRows(r);
    const MatrixXd pg2 = ing.p_g_rot.bottomRows(n - r);

    MatrixXd inner = b2 * q_m * b2.transpose();
    const double scale = (sigma2.asDiagonal() * inner).trace();
    if (method == ReductionMethod::BT) {
        inner += 2.0 * pg2 * bal.a21(r).transpose();
    } else {
        const MatrixXd a22inv_a21 = bal.a22(r).fullPivLu().solve(bal.a21(r));
        inner -= 2.0 * (bal.a22(r) * pg2 + bal.a21(r) * pg1) * a22inv_a21.transpose();
    }
    const double radicand = (sigma2.asDiagonal() * inner).trace();
    return clipped_sqrt(radicand, std::abs(scale),
                        method == ReductionMethod::BT ? "bt_bound" : "spa_bound");
}

}  // namespace

MatrixXd mixed_gramian(const StateSpaceSystem& full, const StateSpaceSystem& rom,
                       const MatrixXd& q_m) {
    if (full.m() != rom.m()) {
        throw DimensionMismatch("mixed_gramian: input dimensions of the systems differ");
    }
    if (q_m.rows() != full.m() || q_m.cols() != full.m()) {
        throw DimensionMismatch("mixed_gramian: q_m must be m x m");
    }
    const MatrixXd w = full.b * q_m * rom.b.transpose();
    return solve_sylvester(full.a, rom.a, w);
}

double general_bound(const StateSpaceSystem& full, const StateSpaceSystem& rom,
                     const MatrixXd& q_m) {
    if (full.p() != rom.p()) {
        throw DimensionMismatch("general_bound: output dimensions of the systems differ");
    }
    const MatrixXd p = reachability_gramian(full, q_m);
    const MatrixXd p_r = reachability_gramian(rom, q_m);
    const MatrixXd p_g = mixed_gramian(full, rom, q_m);

    const double t_full = (full.c * p * full.c.transpose()).trace();
    const double t_rom = (rom.c * p_r * rom.c.transpose()).trace();
    const double t_cross = (full.c * p_g * rom.c.transpose()).trace();
    return clipped_sqrt(t_full + t_rom - 2.0 * t_cross, std::abs(t_full), "general_bound");
}

double bt_bound(const BalancedRealization& bal, Eigen::Index r, const MatrixXd& q_m) {
    const TheoremIngredients ing = prepare(bal, r, ReductionMethod::BT, q_m);
    return theorem_bound(bal, r, ReductionMethod::BT, q_m, ing);
}

double spa_bound(const BalancedRealization& bal, Eigen::Index r, const MatrixXd& q_m) {
    const TheoremIngredients ing = prepare(bal, r, ReductionMethod::SPA, q_m);
    return theorem_bound(bal, r, ReductionMethod::SPA, q_m, ing);
}

BoundReport bound_report(const BalancedRealization& bal, Eigen::Index r,
                         ReductionMethod method, const MatrixXd& q_m) {
    const TheoremIngredients ing = prepare(bal, r, method, q_m);
    BoundReport report;
    report.method = method;
    report.r = r;
    report.p_g = ing.p_g;
    report.p_g_rot = ing.p_g_rot;
    report.eps_theorem = theorem_bound(bal, r, method, q_m, ing);
    report.eps_general = general_bound(bal.sys, ing.rom.system, q_m);
    return report;
}

}  // namespace lsmor
