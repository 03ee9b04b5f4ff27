#include <doctest.h>

#include "lsmor/errors.hpp"
#include "lsmor/gramians.hpp"
#include "lsmor/wave.hpp"
#include "test_support.hpp"

using namespace lsmor;
using namespace lsmor::testing;

namespace {

StateSpaceSystem wave_system(Eigen::Index n) {
    WaveConfig config = WaveConfig::defaults();
    config.n = n;
    config.quad_nodes = std::max(1000, static_cast<int>(10 * n));
    return assemble_wave(config);
}

const MatrixXd kWaveQm = (Eigen::Vector2d(0.5, 2.0)).asDiagonal();

}  // namespace

TEST_CASE("3x3 example reproduces the diagonal Gramians") {
    const StateSpaceSystem sys = example3x3();
    const MatrixXd q_m = MatrixXd::Identity(1, 1);
    MatrixXd expected = MatrixXd::Zero(3, 3);
    expected.diagonal() << 4.0, 2.0, 1.0;
    CHECK((reachability_gramian(sys, q_m) - expected).norm() < 1e-10);
    CHECK((observability_gramian(sys) - expected).norm() < 1e-10);
}

TEST_CASE("zero input or output maps give zero Gramians") {
    CounterRng rng(5, 0);
    const MatrixXd a = random_stable(5, rng);
    const StateSpaceSystem no_input(a, MatrixXd::Zero(5, 2), random_matrix(2, 5, rng));
    CHECK(reachability_gramian(no_input, MatrixXd::Identity(2, 2)).norm() == 0.0);
    const StateSpaceSystem no_output(a, random_matrix(5, 2, rng), MatrixXd::Zero(2, 5));
    CHECK(observability_gramian(no_output).norm() == 0.0);
}

TEST_CASE("wave output moment matches the quadrature oracle") {
    const StateSpaceSystem sys = wave_system(20);
    const MatrixXd p = reachability_gramian(sys, kWaveQm);
    const double moment = (sys.c * p * sys.c.transpose()).trace();

    const MatrixXd w = sys.b * kWaveQm * sys.b.transpose();
    const double horizon = 50.0 / -spectral_abscissa(sys.a);
    const MatrixXd oracle = integral_exp_quadrature(sys.a, sys.a, w, horizon, 100000);
    const double oracle_moment = (sys.c * oracle * sys.c.transpose()).trace();
    CHECK(std::abs(moment - oracle_moment) / std::abs(oracle_moment) < 1e-8);
}

TEST_CASE("random observability Gramian matches the quadrature oracle") {
    CounterRng rng(6, 1);
    const MatrixXd a = random_stable(8, rng);
    const StateSpaceSystem sys(a, random_matrix(8, 1, rng), random_matrix(2, 8, rng));
    const MatrixXd q = observability_gramian(sys);

    const MatrixXd w = sys.c.transpose() * sys.c;
    const double horizon = 50.0 / -spectral_abscissa(a);
    const MatrixXd oracle =
        integral_exp_quadrature(a.transpose(), a.transpose(), w, horizon, 100000);
    CHECK((q - oracle).norm() / oracle.norm() < 1e-6);
}

TEST_CASE("finite-time Gramian") {
    const MatrixXd q_m = MatrixXd::Identity(1, 1);

    SUBCASE("t = 0 gives the zero matrix") {
        const FiniteTimeGramian g = finite_time_gramian(example3x3(), q_m, 0.0, 10);
        CHECK(g.value.norm() == 0.0);
    }

    SUBCASE("long horizons converge to the infinite Gramian") {
        const StateSpaceSystem sys = wave_system(10);
        const double horizon = 50.0 / -spectral_abscissa(sys.a);
        const FiniteTimeGramian g =
            finite_time_gramian(sys, kWaveQm, horizon, static_cast<int>(horizon * 200));
        const MatrixXd p = reachability_gramian(sys, kWaveQm);
        CHECK((g.value - p).norm() / p.norm() < 1e-6);
    }

    SUBCASE("t = 1 on the 3x3 example matches the quadrature oracle") {
        const StateSpaceSystem sys = example3x3();
        const FiniteTimeGramian g = finite_time_gramian(sys, q_m, 1.0, 2000);
        const MatrixXd oracle = integral_exp_quadrature(
            sys.a, sys.a, sys.b * sys.b.transpose(), 1.0, 20000);
        CHECK((g.value - oracle).norm() / oracle.norm() < 1e-9);
    }

    SUBCASE("coarse steps are rejected") {
        CHECK_THROWS_AS((void)finite_time_gramian(example3x3(), q_m, 10.0, 5), StepTooLarge);
    }
}

TEST_CASE("quadratic forms grow monotonically towards the infinite Gramian") {
    const StateSpaceSystem sys = wave_system(10);
    const MatrixXd p = reachability_gramian(sys, kWaveQm);
    CounterRng rng(23, 2);
    VectorXd v = random_matrix(10, 1, rng);
    v.normalize();

    double previous = 0.0;
    for (const double t : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const FiniteTimeGramian g = finite_time_gramian(sys, kWaveQm, t, 4000);
        const double form = v.dot(g.value * v);
        CHECK(form >= previous - 1e-12);
        CHECK(form <= v.dot(p * v) + 1e-10);
        previous = form;
    }
}

TEST_CASE("finite and infinite reachability Gramians span the same image") {
    const StateSpaceSystem sys = wave_system(10);
    const MatrixXd p = reachability_gramian(sys, kWaveQm);
    const FiniteTimeGramian g = finite_time_gramian(sys, kWaveQm, 1.0, 2000);
    CHECK(image_relation(g.value, p, default_rank_tol(10)) == ImageRelation::Equal);
}

TEST_CASE("image comparison basics") {
    const double tol = default_rank_tol(4);
    const MatrixXd eye = MatrixXd::Identity(4, 4);
    CHECK(image_relation(eye, eye, tol) == ImageRelation::Equal);
    CHECK(image_relation(MatrixXd::Zero(4, 4), eye, tol) == ImageRelation::XSubsetY);
    CHECK(image_relation(eye, MatrixXd::Zero(4, 4), tol) == ImageRelation::YSubsetX);
    CHECK(image_relation(MatrixXd::Zero(4, 4), MatrixXd::Zero(4, 4), tol) ==
          ImageRelation::Equal);

    MatrixXd left = MatrixXd::Zero(4, 4);
    left(0, 0) = 1.0;
    MatrixXd right = MatrixXd::Zero(4, 4);
    right(1, 1) = 1.0;
    CHECK(image_relation(left, right, tol) == ImageRelation::Incomparable);
}

TEST_CASE("singular noise covariance strictly shrinks the reachable image") {
    // Two decoupled stable blocks; channel two is switched off by q_m, so
    // ker P contains the second block while B^T ker P != 0.
    MatrixXd a = MatrixXd::Zero(4, 4);
    a.topLeftCorner(2, 2) << -1.0, 0.5, -0.5, -2.0;
    a.bottomRightCorner(2, 2) << -3.0, 1.0, 0.0, -1.5;
    MatrixXd b = MatrixXd::Zero(4, 2);
    b(0, 0) = 1.0;
    b(1, 0) = -0.5;
    b(2, 1) = 1.0;
    b(3, 1) = 0.7;
    const StateSpaceSystem sys(a, b, MatrixXd::Identity(4, 4));

    MatrixXd q_m = MatrixXd::Zero(2, 2);
    q_m(0, 0) = 1.0;  // diag(1, 0)
    const MatrixXd p = reachability_gramian(sys, q_m);
    const MatrixXd p_det = reachability_gramian(sys, MatrixXd::Identity(2, 2));

    const double tol = default_rank_tol(4);
    CHECK(image_relation(p, p_det, tol) == ImageRelation::XSubsetY);

    Eigen::BDCSVD<MatrixXd> svd_p(p);
    Eigen::BDCSVD<MatrixXd> svd_pd(p_det);
    const auto rank = [&](const Eigen::BDCSVD<MatrixXd>& svd) {
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
            if (svd.singularValues()(i) > tol * svd.singularValues()(0)) ++r;
        }
        return r;
    };
    CHECK(rank(svd_p) == 2);
    CHECK(rank(svd_pd) == 4);
}

TEST_CASE("noise-weighted image is contained in the deterministic one") {
    CounterRng rng(31, 3);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.uniform01() * 6.0);
        const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng.uniform01() * 3.0);
        const StateSpaceSystem sys(random_stable(n, rng), random_matrix(n, m, rng),
                                   random_matrix(1, n, rng));

        // Half the trials use a PSD singular weight, half a PD one.
        MatrixXd q_m;
        const bool singular = trial % 2 == 0;
        if (singular && m > 1) {
            const MatrixXd g = random_matrix(m, m - 1, rng);
            q_m = g * g.transpose();
        } else {
            q_m = random_spd(m, rng);
        }
        const MatrixXd p = reachability_gramian(sys, q_m);
        const MatrixXd p_det = reachability_gramian(sys, MatrixXd::Identity(m, m));

        const auto rel = image_relation(p, p_det, default_rank_tol(n));
        CHECK((rel == ImageRelation::Equal || rel == ImageRelation::XSubsetY));
        if (!singular || m == 1) {
            CHECK(rel == ImageRelation::Equal);
        }
    }
}

TEST_CASE("gramian input validation") {
    const StateSpaceSystem sys = example3x3();
    CHECK_THROWS_AS((void)reachability_gramian(sys, MatrixXd::Identity(2, 2)),
                    DimensionMismatch);
    MatrixXd negative = -MatrixXd::Identity(1, 1);
    CHECK_THROWS_AS((void)reachability_gramian(sys, negative), NotPsd);

    const StateSpaceSystem unstable(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2),
                                    MatrixXd::Identity(2, 2));
    CHECK_THROWS_AS((void)reachability_gramian(unstable, MatrixXd::Identity(2, 2)), NotStable);
    CHECK_THROWS_AS((void)observability_gramian(unstable), NotStable);
}
