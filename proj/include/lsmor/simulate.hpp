#pragma once

#include <cstdint>
#include <vector>

#include "lsmor/noise.hpp"
#include "lsmor/state_space.hpp"

namespace lsmor {

enum class IntegrationMethod { EulerMaruyama, ExpEuler };

const char* to_string(IntegrationMethod method);

// Drives the system along one noise path from x0. Returns the outputs on the
// grid 0, dt, ..., steps*dt as a p x (steps+1) matrix.
//
// EulerMaruyama: x_{k+1} = x_k + dt A x_k + B dM_k, valid only when
// |1 + dt mu| < 1 for every eigenvalue mu of A (UnstableStep otherwise).
// ExpEuler: x_{k+1} = exp(A dt) x_k + B dM_k with the exponential formed
// once; exact in the drift for additive noise, no step restriction. 2x2
// block-diagonal drifts (the modal wave form) are propagated block-wise.
MatrixXd integrate(const StateSpaceSystem& sys, const NoisePath& path, const VectorXd& x0,
                   IntegrationMethod method);

struct TrajectoryEnsemble {
    VectorXd times;
    std::vector<MatrixXd> outputs;  // one p x (steps+1) block per sample
    IntegrationMethod method = IntegrationMethod::ExpEuler;
};

TrajectoryEnsemble simulate_ensemble(const StateSpaceSystem& sys, const NoiseSpec& spec,
                                     double t_final, double dt, Eigen::Index samples,
                                     std::uint64_t seed, IntegrationMethod method);

struct McErrorEstimate {
    double sup_mean_error = 0.0;
    double argmax_time = 0.0;
    double std_error_at_argmax = 0.0;
    Eigen::Index sample_count = 0;
};

// Mean output error curve over a shared-noise ensemble. Sample i uses
// stream_id = i, and the same path drives the full and the reduced system.
// Accumulation is blocked and reduced in a fixed order, so results are
// bit-identical for any thread count.
struct McErrorRun {
    VectorXd times;
    VectorXd mean_err;  // mean over samples of |y(t) - y_r(t)|
    VectorXd std_err;   // standard error of that mean, per grid point
    Eigen::Index sample_count = 0;

    McErrorEstimate estimate() const;
};

McErrorRun mc_error_run(const StateSpaceSystem& full, const StateSpaceSystem& rom,
                        const NoiseSpec& spec, double t_final, double dt,
                        Eigen::Index samples, std::uint64_t seed,
                        IntegrationMethod full_method = IntegrationMethod::ExpEuler,
                        IntegrationMethod rom_method = IntegrationMethod::EulerMaruyama,
                        int threads = 0);

// Same ensemble evaluated against several reduced models at once; the full
// trajectory is integrated once per sample and shared across models.
std::vector<McErrorRun> mc_error_runs(const StateSpaceSystem& full,
                                      const std::vector<StateSpaceSystem>& roms,
                                      const NoiseSpec& spec, double t_final, double dt,
                                      Eigen::Index samples, std::uint64_t seed,
                                      IntegrationMethod full_method = IntegrationMethod::ExpEuler,
                                      IntegrationMethod rom_method = IntegrationMethod::EulerMaruyama,
                                      int threads = 0);

McErrorEstimate mc_sup_mean_error(const StateSpaceSystem& full, const StateSpaceSystem& rom,
                                  const NoiseSpec& spec, double t_final, double dt,
                                  Eigen::Index samples, std::uint64_t seed,
                                  IntegrationMethod full_method = IntegrationMethod::ExpEuler,
                                  IntegrationMethod rom_method = IntegrationMethod::EulerMaruyama,
                                  int threads = 0);

struct McMomentEstimate {
    double value = 0.0;        // max over the grid of mean <x(t), v>^2
    double argmax_time = 0.0;
    double std_error = 0.0;    // standard error at the argmax
    Eigen::Index sample_count = 0;
};

// Estimates max_t E <x(t, 0, M), v>^2 for a unit vector v; matches the
// finite-time reachability quadratic form v^T P(T) v.
McMomentEstimate mc_state_projection_moment(const StateSpaceSystem& sys, const NoiseSpec& spec,
                                            const VectorXd& v, double t_final, double dt,
                                            Eigen::Index samples, std::uint64_t seed,
                                            IntegrationMethod method = IntegrationMethod::ExpEuler,
                                            int threads = 0);

}  // namespace lsmor
