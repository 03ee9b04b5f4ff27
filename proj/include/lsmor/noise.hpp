#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "lsmor/linalg.hpp"

namespace lsmor {

// c * W(t) for a standard Wiener process W. A zero scale is allowed and
// describes the degenerate (identically zero) component.
struct ScaledWiener {
    double scale = 1.0;
};

// Compound Poisson process with jump intensity `rate` and i.i.d. jumps
// uniform on (-jump_halfwidth, jump_halfwidth).
struct CompoundPoisson {
    double rate = 1.0;
    double jump_halfwidth = 1.0;
};

using NoiseComponent = std::variant<ScaledWiener, CompoundPoisson>;

// Square-integrable mean-zero noise description. Components are sampled
// independently; covariance_override, when present, replaces the diagonal
// covariance in all Gramian and bound computations.
struct NoiseSpec {
    std::vector<NoiseComponent> components;
    std::optional<MatrixXd> covariance_override;

    Eigen::Index dimension() const { return static_cast<Eigen::Index>(components.size()); }
    void validate() const;

    // The two-channel configuration used by the wave study:
    // M_1 = W / sqrt(2) and M_2 compound Poisson with unit rate and jumps
    // uniform on (-sqrt(6), sqrt(6)).
    static NoiseSpec wave_default();
};

// Covariance at time one: diag(c^2) for scaled Wiener components and
// rate * a^2 / 3 for compound Poisson components, unless overridden.
MatrixXd covariance(const NoiseSpec& spec);

struct NoisePath {
    double dt = 0.0;
    MatrixXd increments;  // m x steps
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

// Draws the per-step increments of every component on a uniform grid.
// Deterministic in (seed, stream_id); jumps are aggregated per step.
NoisePath sample_path(const NoiseSpec& spec, double dt, Eigen::Index steps,
                      std::uint64_t seed, std::uint64_t stream_id);

}  // namespace lsmor
