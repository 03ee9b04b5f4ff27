#include "lsmor/noise.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "lsmor/errors.hpp"
#include "lsmor/rng.hpp"

namespace lsmor {

void NoiseSpec::validate() const {
    if (components.empty()) {
        throw InvalidSpec("NoiseSpec: at least one component is required");
    }
    for (std::size_t i = 0; i < components.size(); ++i) {
        const auto where = "NoiseSpec component " + std::to_string(i);
        if (const auto* w = std::get_if<ScaledWiener>(&components[i])) {
            if (!std::isfinite(w->scale)) {
                throw InvalidSpec(where + ": Wiener scale must be finite");
            }
        } else {
            const auto& cp = std::get<CompoundPoisson>(components[i]);
            if (!(cp.rate > 0.0) || !std::isfinite(cp.rate)) {
                throw InvalidSpec(where + ": Poisson rate must be positive");
            }
            if (!(cp.jump_halfwidth > 0.0) || !std::isfinite(cp.jump_halfwidth)) {
                throw InvalidSpec(where + ": jump half-width must be positive");
            }
        }
    }
    if (covariance_override) {
        const Eigen::Index m = dimension();
        if (covariance_override->rows() != m || covariance_override->cols() != m) {
            throw InvalidSpec("NoiseSpec: covariance override must be m x m");
        }
        if (symmetry_defect(*covariance_override) > 1e-10) {
            throw InvalidSpec("NoiseSpec: covariance override must be symmetric");
        }
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(*covariance_override);
        const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
            throw InvalidSpec("NoiseSpec: covariance override must be positive semidefinite");
        }
    }
}

NoiseSpec NoiseSpec::wave_default() {
    NoiseSpec spec;
    spec.components = {ScaledWiener{1.0 / std::sqrt(2.0)},
                       CompoundPoisson{1.0, std::sqrt(6.0)}};
    return spec;
}

MatrixXd covariance(const NoiseSpec& spec) {
    spec.validate();
    if (spec.covariance_override) return *spec.covariance_override;
    const Eigen::Index m = spec.dimension();
    MatrixXd q = MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& comp = spec.components[static_cast<std::size_t>(i)];
        if (const auto* w = std::get_if<ScaledWiener>(&comp)) {
            q(i, i) = w->scale * w->scale;
        } else {
            const auto& cp = std::get<CompoundPoisson>(comp);
            // E[K^2] = a^2 / 3 for K ~ U(-a, a).
            q(i, i) = cp.rate * cp.jump_halfwidth * cp.jump_halfwidth / 3.0;
        }
    }
    return q;
}

NoisePath sample_path(const NoiseSpec& spec, double dt, Eigen::Index steps,
                      std::uint64_t seed, std::uint64_t stream_id) {
    spec.validate();
    if (!(dt > 0.0)) {
        throw InvalidSpec("sample_path: dt must be positive");
    }
    if (steps < 0) {
        throw InvalidSpec("sample_path: steps must be nonnegative");
    }
    const Eigen::Index m = spec.dimension();
    NoisePath path;
    path.dt = dt;
    path.seed = seed;
    path.stream_id = stream_id;
    path.increments = MatrixXd::Zero(m, steps);

    CounterRng rng(seed, stream_id);
    const double sqrt_dt = std::sqrt(dt);
    for (Eigen::Index k = 0; k < steps; ++k) {
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto& comp = spec.components[static_cast<std::size_t>(i)];
            if (const auto* w = std::get_if<ScaledWiener>(&comp)) {
                path.increments(i, k) = w->scale * sqrt_dt * rng.normal();
            } else {
                const auto& cp = std::get<CompoundPoisson>(comp);
                const int jumps = rng.poisson(cp.rate * dt);
                double sum = 0.0;
                for (int j = 0; j < jumps; ++j) {
                    sum += rng.uniform(-cp.jump_halfwidth, cp.jump_halfwidth);
                }
                path.increments(i, k) = sum;
            }
        }
    }
    return path;
}

}  // namespace lsmor
