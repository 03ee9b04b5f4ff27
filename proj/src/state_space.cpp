#include "lsmor/state_space.hpp"

#include <string>

namespace lsmor {

StateSpaceSystem::StateSpaceSystem(MatrixXd a_in, MatrixXd b_in, MatrixXd c_in)
    : a(std::move(a_in)), b(std::move(b_in)), c(std::move(c_in)) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("StateSpaceSystem: a must be square, got " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
    if (b.rows() != a.rows()) {
        throw DimensionMismatch("StateSpaceSystem: b has " + std::to_string(b.rows()) +
                                " rows, expected " + std::to_string(a.rows()));
    }
    if (c.cols() != a.rows()) {
        throw DimensionMismatch("StateSpaceSystem: c has " + std::to_string(c.cols()) +
                                " cols, expected " + std::to_string(a.rows()));
    }
}

bool is_asymptotically_stable(const MatrixXd& a) {
    if (a.size() == 0) return true;
    return spectral_abscissa(a) < -1e-12 * spectral_norm(a);
}

void require_stable(const MatrixXd& a, const char* who) {
    if (!is_asymptotically_stable(a)) {
        throw NotStable(std::string(who) + ": drift matrix is not asymptotically stable "
                        "(spectral abscissa " + std::to_string(spectral_abscissa(a)) + ")");
    }
}

}  // namespace lsmor
