#pragma once

// Shared fixtures and independent oracles for the test suites. The
// quadrature oracle deliberately avoids the library's Lyapunov/Sylvester
// path: it only uses dense matrix exponentials and composite Simpson.

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "lsmor/linalg.hpp"
#include "lsmor/rng.hpp"
#include "lsmor/state_space.hpp"

namespace lsmor::testing {

// integral_0^T exp(a s) w exp(f^T s) ds by composite Simpson with `nodes`
// panels (nodes must be even). exp(a s_k) is advanced by one fixed factor
// per node, so cost is O(nodes * n^3) without repeated exponentials.
inline MatrixXd integral_exp_quadrature(const MatrixXd& a, const MatrixXd& f,
                                        const MatrixXd& w, double t_final, int nodes) {
    if (nodes % 2 != 0) ++nodes;
    const double h = t_final / nodes;
    const MatrixXd ea = (a * h).exp();
    const MatrixXd ef_t = (f * h).exp().transpose();

    MatrixXd left = MatrixXd::Identity(a.rows(), a.rows());
    MatrixXd right = MatrixXd::Identity(f.rows(), f.rows());
    MatrixXd acc = w;  // k = 0 term, weight 1
    for (int k = 1; k <= nodes; ++k) {
        left = ea * left;
        right = right * ef_t;
        const double weight = (k == nodes) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        acc += weight * (left * w * right);
    }
    return acc * (h / 3.0);
}

inline MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, CounterRng& rng) {
    MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    }
    return m;
}

// Dense matrix with abscissa shifted below a drawn negative margin.
inline MatrixXd random_stable(Eigen::Index n, CounterRng& rng) {
    MatrixXd g = random_matrix(n, n, rng) / std::sqrt(static_cast<double>(n));
    const double margin = 0.3 + 0.7 * rng.uniform01();
    g.diagonal().array() -= spectral_abscissa(g) + margin;
    return g;
}

inline MatrixXd random_spd(Eigen::Index n, CounterRng& rng) {
    const MatrixXd g = random_matrix(n, n, rng);
    return g * g.transpose() + 0.1 * MatrixXd::Identity(n, n);
}

// The balanced 3x3 worked example: A is the Cauchy-type matrix built from
// b = (4, 2, 1) and sigma = (4, 2, 1); P = Q = diag(4, 2, 1).
inline StateSpaceSystem example3x3() {
    MatrixXd a(3, 3);
    a << -2.0, -4.0 / 3.0, -4.0 / 5.0,
         -4.0 / 3.0, -1.0, -2.0 / 3.0,
         -4.0 / 5.0, -2.0 / 3.0, -0.5;
    MatrixXd b(3, 1);
    b << 4.0, 2.0, 1.0;
    MatrixXd c(1, 3);
    c << 4.0, 2.0, 1.0;
    return StateSpaceSystem(std::move(a), std::move(b), std::move(c));
}

}  // namespace lsmor::testing
