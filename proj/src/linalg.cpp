#include "lsmor/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <limits>

#include "lsmor/errors.hpp"

namespace lsmor {

double spectral_norm(const MatrixXd& x) {
    if (x.size() == 0) return 0.0;
    const Eigen::Index n = x.cols();
    VectorXd v = VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
    double sigma = 0.0;
    for (int it = 0; it < 200; ++it) {
        VectorXd w = x.transpose() * (x * v);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        w /= norm;
        const double next = std::sqrt(norm);
        if (it > 2 && std::abs(next - sigma) <= 1e-10 * next) {
            return next;
        }
        sigma = next;
        v = w;
    }
    return sigma;
}

bool is_quasi_upper_triangular(const MatrixXd& x) {
    if (x.rows() != x.cols()) return false;
    const Eigen::Index n = x.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j + 2; i < n; ++i) {
            if (x(i, j) != 0.0) return false;
        }
    }
    for (Eigen::Index i = 0; i + 2 < n; ++i) {
        if (x(i + 1, i) != 0.0 && x(i + 2, i + 1) != 0.0) return false;
    }
    return true;
}

std::optional<std::vector<Block2>> block_diagonal_2x2(const MatrixXd& a) {
    const Eigen::Index n = a.rows();
    if (n != a.cols() || n % 2 != 0 || n == 0) return std::nullopt;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if ((i / 2) != (j / 2) && a(i, j) != 0.0) return std::nullopt;
        }
    }
    std::vector<Block2> blocks(static_cast<std::size_t>(n / 2));
    for (Eigen::Index k = 0; k < n / 2; ++k) {
        blocks[static_cast<std::size_t>(k)] = a.block<2, 2>(2 * k, 2 * k);
    }
    return blocks;
}

VectorXcd eigenvalues(const MatrixXd& a) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("eigenvalues: matrix must be square");
    }
    if (auto blocks = block_diagonal_2x2(a)) {
        VectorXcd ev(a.rows());
        Eigen::Index k = 0;
        for (const Block2& b : *blocks) {
            const double tr = b(0, 0) + b(1, 1);
            const double det = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0);
            const std::complex<double> disc =
                std::sqrt(std::complex<double>(tr * tr / 4.0 - det, 0.0));
            ev(k++) = tr / 2.0 + disc;
            ev(k++) = tr / 2.0 - disc;
        }
        return ev;
    }
    Eigen::EigenSolver<MatrixXd> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw EigFailure("eigenvalues: dense eigensolver failed to converge");
    }
    return es.eigenvalues();
}

double spectral_abscissa(const MatrixXd& a) {
    if (a.size() == 0) return -std::numeric_limits<double>::infinity();
    return eigenvalues(a).real().maxCoeff();
}

MatrixXd psd_clip(const MatrixXd& x, double clip, double err) {
    if (x.rows() != x.cols()) {
        throw DimensionMismatch("psd_clip: matrix must be square");
    }
    const MatrixXd xs = 0.5 * (x + x.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(xs);
    if (es.info() != Eigen::Success) {
        throw EigFailure("psd_clip: symmetric eigensolver failed");
    }
    VectorXd ev = es.eigenvalues();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 0.0);
    if (ev.minCoeff() < -err * scale) {
        throw NotPsd("psd_clip: eigenvalue " + std::to_string(ev.minCoeff()) +
                     " below -" + std::to_string(err) + " * " + std::to_string(scale));
    }
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < 0.0 && ev(i) >= -clip * scale) ev(i) = 0.0;
        if (ev(i) < 0.0) ev(i) = 0.0;  // between clip and err: treat as rounding too
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

MatrixXd symmetric_sqrt(const MatrixXd& x) {
    const MatrixXd xs = 0.5 * (x + x.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(xs);
    if (es.info() != Eigen::Success) {
        throw EigFailure("symmetric_sqrt: symmetric eigensolver failed");
    }
    VectorXd ev = es.eigenvalues();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 0.0);
    if (ev.minCoeff() < -1e-8 * scale) {
        throw NotPsd("symmetric_sqrt: matrix is indefinite");
    }
    const VectorXd roots = ev.cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

double default_rank_tol(Eigen::Index n) {
    return static_cast<double>(n) * std::numeric_limits<double>::epsilon() * 1e3;
}

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double v : xs) s += v;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double symmetry_defect(const MatrixXd& x) {
    return (x - x.transpose()).norm() / std::max(1.0, x.norm());
}

}  // namespace lsmor
