#pragma once

#include "lsmor/linalg.hpp"

namespace lsmor {

// Solves a X + X f^T + w = 0 for stable a (n x n) and f (r x r), w n x r.
// Bartels-Stewart: both coefficient matrices are reduced to real Schur form
// (skipped when already quasi upper triangular) and the triangular equation
// is back-substituted block-wise.
MatrixXd solve_sylvester(const MatrixXd& a, const MatrixXd& f, const MatrixXd& w);

// Solves a X + X a^T + w = 0 with symmetric w; the result is symmetrized.
MatrixXd solve_lyapunov(const MatrixXd& a, const MatrixXd& w);

}  // namespace lsmor
