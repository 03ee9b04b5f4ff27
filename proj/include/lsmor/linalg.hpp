#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace lsmor {

using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Unaligned 2x2 block, safe to keep in plain std containers.
using Block2 = Eigen::Matrix<double, 2, 2, Eigen::DontAlign>;

// Largest singular value, estimated by power iteration on x^T x with a fixed
// deterministic start vector. Accurate to far better than the tolerance
// scales it feeds; O(n^2) per iteration.
double spectral_norm(const MatrixXd& x);

// True if everything below the first subdiagonal is zero and no two adjacent
// subdiagonal entries are nonzero (real Schur shape). Block-diagonal
// matrices with 2x2 blocks qualify.
bool is_quasi_upper_triangular(const MatrixXd& x);

// If a is block diagonal with 2x2 diagonal blocks, returns them in order.
std::optional<std::vector<Block2>> block_diagonal_2x2(const MatrixXd& a);

// Eigenvalues of a real square matrix; closed-form per block when a is 2x2
// block diagonal, dense solver otherwise. Throws EigFailure if the dense
// solver does not converge.
VectorXcd eigenvalues(const MatrixXd& a);

// Max real part of the eigenvalues.
double spectral_abscissa(const MatrixXd& a);

// Symmetric PSD projection: eigenvalues in [-clip*s, 0) are set to zero
// where s = lambda_max; anything below -err*s throws NotPsd.
MatrixXd psd_clip(const MatrixXd& x, double clip = 1e-10, double err = 1e-8);

// Symmetric PSD square root via eigendecomposition, clipping first.
MatrixXd symmetric_sqrt(const MatrixXd& x);

// Default numerical rank threshold relative to sigma_max.
double default_rank_tol(Eigen::Index n);

// Order-independent sum (recursive pairwise splitting).
double pairwise_sum(std::span<const double> xs);

// Relative symmetry defect ||x - x^T||_F / max(1, ||x||_F).
double symmetry_defect(const MatrixXd& x);

}  // namespace lsmor
