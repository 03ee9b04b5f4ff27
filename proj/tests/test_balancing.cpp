#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "lsmor/balancing.hpp"
#include "lsmor/errors.hpp"
#include "lsmor/gramians.hpp"
#include "lsmor/wave.hpp"
#include "test_support.hpp"

using namespace lsmor;
using namespace lsmor::testing;

namespace {

// System that is balanced by construction: A_ij = -b_i b_j / (s_i + s_j)
// with C = B^T solves A S + S A^T = -B B^T for S = diag(s), and the Cauchy
// structure makes A negative definite.
StateSpaceSystem balanced_by_construction(const VectorXd& sigma, const VectorXd& b) {
    const Eigen::Index n = sigma.size();
    MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            a(i, j) = -b(i) * b(j) / (sigma(i) + sigma(j));
        }
    }
    return StateSpaceSystem(a, b, b.transpose());
}

}  // namespace

TEST_CASE("hankel singular values of the 3x3 example") {
    MatrixXd g = MatrixXd::Zero(3, 3);
    g.diagonal() << 4.0, 2.0, 1.0;
    const VectorXd hsv = hankel_singular_values(g, g);
    CHECK(std::abs(hsv(0) - 4.0) < 1e-12);
    CHECK(std::abs(hsv(1) - 2.0) < 1e-12);
    CHECK(std::abs(hsv(2) - 1.0) < 1e-12);
}

TEST_CASE("identity Gramians give unit singular values") {
    const VectorXd hsv = hankel_singular_values(MatrixXd::Identity(5, 5),
                                                MatrixXd::Identity(5, 5));
    CHECK((hsv - VectorXd::Ones(5)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("hankel singular values match sqrt(eig(pq)) from a dense eigensolver") {
    CounterRng rng(41, 0);
    const MatrixXd p = random_spd(6, rng);
    const MatrixXd q = random_spd(6, rng);
    const VectorXd hsv = hankel_singular_values(p, q);

    Eigen::EigenSolver<MatrixXd> es(p * q);
    REQUIRE(es.info() == Eigen::Success);
    VectorXd expected = es.eigenvalues().real().cwiseMax(0.0).cwiseSqrt();
    std::sort(expected.data(), expected.data() + expected.size(), std::greater<double>());
    CHECK((hsv - expected).cwiseAbs().maxCoeff() < 1e-8 * expected(0));
}

TEST_CASE("already balanced systems balance with the identity transform") {
    const StateSpaceSystem sys = example3x3();
    const MatrixXd q_m = MatrixXd::Identity(1, 1);
    const GramianSet set = compute_gramians(sys, q_m);
    const BalancedRealization bal = balance(sys, set.p, set.q);

    CHECK((bal.t_fwd - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(std::abs(bal.hsv(0) - 4.0) < 1e-8);
    CHECK(std::abs(bal.hsv(1) - 2.0) < 1e-8);
    CHECK(std::abs(bal.hsv(2) - 1.0) < 1e-8);
}

TEST_CASE("balanced realization invariants") {
    CounterRng rng(42, 1);
    const Eigen::Index n = 7;
    const StateSpaceSystem sys(random_stable(n, rng), random_matrix(n, 2, rng),
                               random_matrix(2, n, rng));
    const MatrixXd q_m = random_spd(2, rng);
    const GramianSet set = compute_gramians(sys, q_m);
    const BalancedRealization bal = balance(sys, set.p, set.q);

    CHECK((bal.t_fwd * bal.t_inv - MatrixXd::Identity(n, n)).norm() < 1e-8 * n);

    const MatrixXd p_bal = bal.t_fwd * set.p * bal.t_fwd.transpose();
    const MatrixXd q_bal = bal.t_inv.transpose() * set.q * bal.t_inv;
    const MatrixXd sigma = bal.hsv.asDiagonal();
    CHECK((p_bal - sigma).norm() < 1e-6 * bal.hsv(0) * n);
    CHECK((q_bal - sigma).norm() < 1e-6 * bal.hsv(0) * n);

    // Balanced coefficients are consistent with the transform pair.
    CHECK((bal.a_bal - bal.t_fwd * sys.a * bal.t_inv).norm() < 1e-10 * sys.a.norm());
    CHECK((hankel_singular_values(set.p, set.q) - bal.hsv).cwiseAbs().maxCoeff() <
          1e-10 * bal.hsv(0));
}

TEST_CASE("hankel singular values are similarity invariant") {
    CounterRng rng(43, 2);
    const Eigen::Index n = 6;
    const StateSpaceSystem sys(random_stable(n, rng), random_matrix(n, 2, rng),
                               random_matrix(1, n, rng));
    const GramianSet set = compute_gramians(sys, MatrixXd::Identity(2, 2));
    const VectorXd hsv = hankel_singular_values(set.p, set.q);

    const MatrixXd s = random_matrix(n, n, rng) + 3.0 * MatrixXd::Identity(n, n);
    const MatrixXd s_inv = s.inverse();
    const MatrixXd p_hat = s * set.p * s.transpose();
    const MatrixXd q_hat = s_inv.transpose() * set.q * s_inv;
    const VectorXd hsv_hat = hankel_singular_values(p_hat, q_hat);
    CHECK((hsv - hsv_hat).cwiseAbs().maxCoeff() < 1e-10 * hsv(0));
}

TEST_CASE("wave system balances to diagonal Gramians after projection") {
    WaveConfig config = WaveConfig::defaults();
    config.n = 20;
    config.quad_nodes = 1000;
    const StateSpaceSystem sys = assemble_wave(config);
    const MatrixXd q_m = Eigen::Vector2d(0.5, 2.0).asDiagonal();
    const GramianSet set = compute_gramians(sys, q_m);

    // Even modes are exactly unobservable, so balancing requires the
    // projection step first.
    CHECK_THROWS_AS((void)balance(sys, set.p, set.q), NotPd);

    const MinimalProjection proj = project_minimal(sys, set.p, set.q, default_rank_tol(20));
    CHECK(proj.sys.n() == 10);
    const BalancedRealization bal = balance(proj.sys, proj.p, proj.q);

    const MatrixXd p_bal = bal.t_fwd * proj.p * bal.t_fwd.transpose();
    MatrixXd off = p_bal;
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() < 1e-8 * bal.hsv(0));

    // The projected model reproduces the original output moment.
    const MatrixXd p_proj = reachability_gramian(proj.sys, q_m);
    const double moment_full = (sys.c * set.p * sys.c.transpose()).trace();
    const double moment_proj = (proj.sys.c * p_proj * proj.sys.c.transpose()).trace();
    CHECK(std::abs(moment_full - moment_proj) < 1e-10 * std::abs(moment_full));
}

TEST_CASE("balanced truncation of the 3x3 example") {
    const StateSpaceSystem sys = example3x3();
    const MatrixXd q_m = MatrixXd::Identity(1, 1);
    const GramianSet set = compute_gramians(sys, q_m);
    const BalancedRealization bal = balance(sys, set.p, set.q);

    const ReducedModel rom = reduce_bt(bal, 2);
    CHECK(rom.r == 2);
    CHECK(rom.method == ReductionMethod::BT);
    CHECK((rom.system.a - bal.a_bal.topLeftCorner(2, 2)).norm() == 0.0);
    CHECK(rom.parent_hsv_tail.size() == 1);
    CHECK(std::abs(rom.parent_hsv_tail(0) - 1.0) < 1e-8);

    MatrixXd sigma1 = MatrixXd::Zero(2, 2);
    sigma1.diagonal() << 4.0, 2.0;
    const MatrixXd p_r = reachability_gramian(rom.system, q_m);
    const MatrixXd q_r = observability_gramian(rom.system);
    CHECK((p_r - sigma1).norm() < 1e-8);
    CHECK((q_r - sigma1).norm() < 1e-8);

    CHECK_THROWS_AS((void)reduce_bt(bal, 3), BadOrder);
    CHECK_THROWS_AS((void)reduce_bt(bal, 0), BadOrder);
}

TEST_CASE("tied singular values are rejected with the offending pair") {
    // Two identical decoupled channels: P = Q = I, hsv = (1, 1).
    const StateSpaceSystem sys(-0.5 * MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2),
                               MatrixXd::Identity(2, 2));
    const GramianSet set = compute_gramians(sys, MatrixXd::Identity(2, 2));
    const BalancedRealization bal = balance(sys, set.p, set.q);
    CHECK_THROWS_AS((void)reduce_bt(bal, 1), HsvTie);
    CHECK_THROWS_AS((void)reduce_spa(bal, 1), HsvTie);
}

TEST_CASE("singular perturbation approximation of the 3x3 example") {
    const StateSpaceSystem sys = example3x3();
    const MatrixXd q_m = MatrixXd::Identity(1, 1);
    const GramianSet set = compute_gramians(sys, q_m);
    const BalancedRealization bal = balance(sys, set.p, set.q);

    const ReducedModel rom = reduce_spa(bal, 2);
    CHECK(rom.method == ReductionMethod::SPA);

    // B_r = B_1: identical input map for BT and SPA.
    const ReducedModel bt = reduce_bt(bal, 2);
    CHECK((rom.system.b - bt.system.b).norm() == 0.0);

    const MatrixXd p_r = reachability_gramian(rom.system, q_m);
    MatrixXd p_expected(2, 2);
    p_expected << 10.1604, 2.5668, 2.5668, 11.8396;
    CHECK((p_r - p_expected).cwiseAbs().maxCoeff() < 1e-3);

    const MatrixXd q_r = observability_gramian(rom.system);
    MatrixXd q_expected = MatrixXd::Zero(2, 2);
    q_expected.diagonal() << 4.0, 2.0;
    CHECK((q_r - q_expected).cwiseAbs().maxCoeff() < 1e-8);

    const VectorXd rom_hsv = hankel_singular_values(p_r, q_r);
    CHECK(std::abs(rom_hsv(0) - 6.5822) < 1e-3);
    CHECK(std::abs(rom_hsv(1) - 4.5822) < 1e-3);

    // Unlike the observability Gramian, the reachability Gramian of the SPA
    // model is not the leading Hankel block.
    MatrixXd sigma1 = MatrixXd::Zero(2, 2);
    sigma1.diagonal() << 4.0, 2.0;
    CHECK((p_r - sigma1).norm() > 1.0);
}

TEST_CASE("spa equals bt when the balanced drift is block diagonal") {
    // Two decoupled balanced subsystems with separate inputs and outputs:
    // the assembled system is balanced with P = Q = diag(4, 3, 2, 1) and has
    // A_12 = A_21 = 0, so the quasi-steady-state correction vanishes.
    VectorXd sigma1(2), b1(2), sigma2(2), b2(2);
    sigma1 << 4.0, 3.0;
    b1 << 1.0, 2.0;
    sigma2 << 2.0, 1.0;
    b2 << 1.0, 1.0;
    const StateSpaceSystem top = balanced_by_construction(sigma1, b1);
    const StateSpaceSystem bottom = balanced_by_construction(sigma2, b2);

    MatrixXd a = MatrixXd::Zero(4, 4);
    a.topLeftCorner(2, 2) = top.a;
    a.bottomRightCorner(2, 2) = bottom.a;
    MatrixXd b = MatrixXd::Zero(4, 2);
    b.col(0).head(2) = b1;
    b.col(1).tail(2) = b2;
    const StateSpaceSystem sys(a, b, b.transpose());

    const GramianSet set = compute_gramians(sys, MatrixXd::Identity(2, 2));
    const BalancedRealization bal = balance(sys, set.p, set.q);
    const ReducedModel bt = reduce_bt(bal, 2);
    const ReducedModel spa = reduce_spa(bal, 2);
    CHECK((bt.system.a - spa.system.a).norm() < 1e-12);
    CHECK((bt.system.c - spa.system.c).norm() < 1e-12);
}

TEST_CASE("spectral abscissa") {
    CHECK(spectral_abscissa(-MatrixXd::Identity(3, 3)) == doctest::Approx(-1.0));

    MatrixXd mode(2, 2);
    mode << 0.0, 1.0, -1.0, -2.0;  // critically damped: double eigenvalue -1
    CHECK(spectral_abscissa(mode) == doctest::Approx(-1.0).epsilon(1e-9));

    WaveConfig config = WaveConfig::defaults();
    config.n = 20;
    config.quad_nodes = 1000;
    const StateSpaceSystem sys = assemble_wave(config);
    // Contraction rate bound 2 a l1 / (4 l1 + a (a + sqrt(a^2 + 4 l1)))
    // at l1 = 1, a = 2.
    const double alpha = 2.0;
    const double bound = 2.0 * alpha / (4.0 + alpha * (alpha + std::sqrt(alpha * alpha + 4.0)));
    CHECK(spectral_abscissa(sys.a) <= -bound + 1e-12);
}

TEST_CASE("reduction preserves stability on random positive definite instances") {
    CounterRng rng(44, 3);
    int tested = 0;
    while (tested < 50) {
        const Eigen::Index n = 4 + static_cast<Eigen::Index>(rng.uniform01() * 8.0);
        const StateSpaceSystem sys(random_stable(n, rng), random_matrix(n, n, rng),
                                   random_matrix(n, n, rng));
        const GramianSet set = compute_gramians(sys, MatrixXd::Identity(n, n));
        const BalancedRealization bal = balance(sys, set.p, set.q);

        const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng.uniform01() * (n - 1));
        ReducedModel bt, spa;
        try {
            bt = reduce_bt(bal, r);
            spa = reduce_spa(bal, r);
        } catch (const HsvTie&) {
            continue;  // tie at the split point; draw another instance
        }
        CHECK(spectral_abscissa(bt.system.a) < 0.0);
        CHECK(spectral_abscissa(spa.system.a) < 0.0);
        CHECK(spectral_abscissa(bal.a22(r)) < 0.0);
        ++tested;
    }
}

TEST_CASE("balance validates its Gramians") {
    const StateSpaceSystem sys = example3x3();
    CHECK_THROWS_AS((void)balance(sys, MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2)),
                    DimensionMismatch);
    MatrixXd singular = MatrixXd::Zero(3, 3);
    singular(0, 0) = 1.0;
    CHECK_THROWS_AS((void)balance(sys, singular, MatrixXd::Identity(3, 3)), NotPd);
    CHECK_THROWS_AS((void)balance(sys, -MatrixXd::Identity(3, 3), MatrixXd::Identity(3, 3)),
                    NotPsd);
    CHECK_THROWS_AS((void)hankel_singular_values(-MatrixXd::Identity(3, 3),
                                                 MatrixXd::Identity(3, 3)),
                    NotPsd);
}
