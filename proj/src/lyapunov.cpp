#include "lsmor/lyapunov.hpp"

#include <Eigen/Eigenvalues>

#include <string>
#include <utility>
#include <vector>

#include "lsmor/errors.hpp"
#include "lsmor/state_space.hpp"

namespace lsmor {

namespace {

// Diagonal block partition (sizes 1 or 2) of a quasi upper triangular matrix.
std::vector<std::pair<Eigen::Index, Eigen::Index>> schur_blocks(const MatrixXd& s) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;
    const Eigen::Index n = s.rows();
    Eigen::Index i = 0;
    while (i < n) {
        const Eigen::Index width = (i + 1 < n && s(i + 1, i) != 0.0) ? 2 : 1;
        blocks.emplace_back(i, width);
        i += width;
    }
    return blocks;
}

bool off_blocks_zero(const MatrixXd& s,
                     const std::vector<std::pair<Eigen::Index, Eigen::Index>>& blocks) {
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
        const auto [i0, iw] = blocks[bi];
        if (s.block(0, i0, i0, iw).cwiseAbs().maxCoeff() != 0.0) return false;
    }
    return true;
}

// Solves S Y + Y T^T = G for quasi upper triangular S (n x n) and T (r x r).
// Columns of Y are resolved right to left, rows bottom to top; each diagonal
// pair reduces to a dense system of size at most 4 via the Kronecker identity
// vec(S Y + Y T^T) = (I (x) S + T (x) I) vec(Y).
MatrixXd solve_quasi_triangular(const MatrixXd& s, const MatrixXd& t, MatrixXd g) {
    const auto sblocks = schur_blocks(s);
    const auto tblocks = schur_blocks(t);
    const bool s_diag = off_blocks_zero(s, sblocks);
    const bool t_diag = off_blocks_zero(t, tblocks);
    const Eigen::Index n = s.rows();
    MatrixXd y = MatrixXd::Zero(n, t.rows());

    for (std::size_t kb = tblocks.size(); kb-- > 0;) {
        const auto [k0, kw] = tblocks[kb];
        const Eigen::Index rest = t.rows() - (k0 + kw);
        if (rest > 0 && !t_diag) {
            g.middleCols(k0, kw).noalias() -=
                y.middleCols(k0 + kw, rest) * t.block(k0, k0 + kw, kw, rest).transpose();
        }
        for (std::size_t ib = sblocks.size(); ib-- > 0;) {
            const auto [i0, iw] = sblocks[ib];
            Eigen::Matrix<double, 4, 4> m = Eigen::Matrix<double, 4, 4>::Zero();
            Eigen::Matrix<double, 4, 1> rhs = Eigen::Matrix<double, 4, 1>::Zero();
            // vec is column-major over the iw x kw unknown block.
            for (Eigen::Index q = 0; q < kw; ++q) {
                for (Eigen::Index pr = 0; pr < iw; ++pr) {
                    rhs(q * iw + pr) = g(i0 + pr, k0 + q);
                    for (Eigen::Index pc = 0; pc < iw; ++pc) {
                        m(q * iw + pr, q * iw + pc) += s(i0 + pr, i0 + pc);
                    }
                    for (Eigen::Index qc = 0; qc < kw; ++qc) {
                        m(q * iw + pr, qc * iw + pr) += t(k0 + q, k0 + qc);
                    }
                }
            }
            const Eigen::Index sz = iw * kw;
            const Eigen::Matrix<double, 4, 1> sol =
                m.topLeftCorner(sz, sz).fullPivLu().solve(rhs.head(sz)).eval();
            for (Eigen::Index q = 0; q < kw; ++q) {
                for (Eigen::Index pr = 0; pr < iw; ++pr) {
                    y(i0 + pr, k0 + q) = sol(q * iw + pr);
                }
            }
            if (i0 > 0 && !s_diag) {
                g.block(0, k0, i0, kw).noalias() -=
                    s.block(0, i0, i0, iw) * y.block(i0, k0, iw, kw);
            }
        }
    }
    return y;
}

struct SchurForm {
    MatrixXd u;  // empty when the input was already quasi triangular
    MatrixXd s;
    bool identity;
};

SchurForm real_schur(const MatrixXd& a) {
    if (is_quasi_upper_triangular(a)) {
        return {MatrixXd(), a, true};
    }
    Eigen::RealSchur<MatrixXd> schur(a);
    if (schur.info() != Eigen::Success) {
        throw EigFailure("solve_sylvester: real Schur decomposition failed");
    }
    return {schur.matrixU(), schur.matrixT(), false};
}

}  // namespace

MatrixXd solve_sylvester(const MatrixXd& a, const MatrixXd& f, const MatrixXd& w) {
    if (a.rows() != a.cols() || f.rows() != f.cols()) {
        throw DimensionMismatch("solve_sylvester: a and f must be square");
    }
    if (w.rows() != a.rows() || w.cols() != f.rows()) {
        throw DimensionMismatch("solve_sylvester: w must be " + std::to_string(a.rows()) +
                                "x" + std::to_string(f.rows()));
    }
    require_stable(a, "solve_sylvester");
    require_stable(f, "solve_sylvester");
    if (w.size() == 0) return MatrixXd::Zero(a.rows(), f.rows());

    const SchurForm sa = real_schur(a);
    const SchurForm sf = real_schur(f);
    MatrixXd g = -w;
    if (!sa.identity) g = sa.u.transpose() * g;
    if (!sf.identity) g = g * sf.u;
    MatrixXd y = solve_quasi_triangular(sa.s, sf.s, std::move(g));
    if (!sa.identity) y = sa.u * y;
    if (!sf.identity) y = y * sf.u.transpose();
    return y;
}

MatrixXd solve_lyapunov(const MatrixXd& a, const MatrixXd& w) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("solve_lyapunov: a must be square");
    }
    if (w.rows() != a.rows() || w.cols() != a.rows()) {
        throw DimensionMismatch("solve_lyapunov: w must match a");
    }
    if (symmetry_defect(w) > 1e-10) {
        throw NotSymmetric("solve_lyapunov: right-hand side is not symmetric");
    }
    require_stable(a, "solve_lyapunov");
    if (a.size() == 0) return MatrixXd();

    const SchurForm sa = real_schur(a);
    MatrixXd g = -0.5 * (w + w.transpose());
    if (!sa.identity) g = sa.u.transpose() * g * sa.u;
    MatrixXd y = solve_quasi_triangular(sa.s, sa.s, std::move(g));
    MatrixXd x = sa.identity ? std::move(y) : MatrixXd(sa.u * y * sa.u.transpose());
    return 0.5 * (x + x.transpose());
}

}  // namespace lsmor
