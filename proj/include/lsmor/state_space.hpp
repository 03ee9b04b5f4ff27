#pragma once

#include <Eigen/Dense>

#include "lsmor/errors.hpp"
#include "lsmor/linalg.hpp"

namespace lsmor {

// Linear time-invariant triple dx = A x dt + B dM, y = C x.
struct StateSpaceSystem {
    MatrixXd a;  // n x n drift
    MatrixXd b;  // n x m noise input map
    MatrixXd c;  // p x n output map

    StateSpaceSystem() = default;
    StateSpaceSystem(MatrixXd a_in, MatrixXd b_in, MatrixXd c_in);

    Eigen::Index n() const { return a.rows(); }
    Eigen::Index m() const { return b.cols(); }
    Eigen::Index p() const { return c.rows(); }
};

// Asymptotic stability with margin: abscissa < -1e-12 * ||a||_2.
bool is_asymptotically_stable(const MatrixXd& a);

// Throws NotStable with the caller's name in the message.
void require_stable(const MatrixXd& a, const char* who);

}  // namespace lsmor
