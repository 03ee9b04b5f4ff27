#include "lsmor/simulate.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "lsmor/errors.hpp"

namespace lsmor {

namespace {

// Samples per accumulation block. Block boundaries are fixed, so partial
// sums do not depend on how blocks are distributed over threads.
constexpr Eigen::Index kSampleBlock = 32;

// One-step state propagator; block-diagonal drifts are applied per 2x2 block.
class Propagator {
public:
    static Propagator exp_euler(const MatrixXd& a, double dt) {
        Propagator prop;
        if (auto blocks = block_diagonal_2x2(a)) {
            prop.blocks_.emplace();
            prop.blocks_->reserve(blocks->size());
            for (const Block2& b : *blocks) {
                const Eigen::Matrix2d e = (Eigen::Matrix2d(b) * dt).exp();
                prop.blocks_->push_back(Block2(e));
            }
        } else {
            prop.dense_ = (a * dt).exp();
        }
        return prop;
    }

    static Propagator euler_maruyama(const MatrixXd& a, double dt) {
        const VectorXcd mu = eigenvalues(a);
        for (Eigen::Index i = 0; i < mu.size(); ++i) {
            if (std::abs(1.0 + dt * mu(i)) >= 1.0) {
                throw UnstableStep(
                    "integrate: Euler-Maruyama step is unstable for eigenvalue (" +
                    std::to_string(mu(i).real()) + ", " + std::to_string(mu(i).imag()) +
                    ") at dt=" + std::to_string(dt));
            }
        }
        Propagator prop;
        prop.dense_ = MatrixXd::Identity(a.rows(), a.rows()) + dt * a;
        return prop;
    }

    void apply(VectorXd& x, VectorXd& scratch) const {
        if (blocks_) {
            for (std::size_t i = 0; i < blocks_->size(); ++i) {
                const Block2& e = (*blocks_)[i];
                const double x0 = x(2 * static_cast<Eigen::Index>(i));
                const double x1 = x(2 * static_cast<Eigen::Index>(i) + 1);
                x(2 * static_cast<Eigen::Index>(i)) = e(0, 0) * x0 + e(0, 1) * x1;
                x(2 * static_cast<Eigen::Index>(i) + 1) = e(1, 0) * x0 + e(1, 1) * x1;
            }
        } else {
            scratch.noalias() = dense_ * x;
            x.swap(scratch);
        }
    }

private:
    std::optional<std::vector<Block2>> blocks_;
    MatrixXd dense_;
};

Propagator make_propagator(const StateSpaceSystem& sys, double dt, IntegrationMethod method) {
    return method == IntegrationMethod::ExpEuler ? Propagator::exp_euler(sys.a, dt)
                                                 : Propagator::euler_maruyama(sys.a, dt);
}

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

Eigen::Index grid_steps(double t_final, double dt) {
    if (!(dt > 0.0) || !(t_final > 0.0)) {
        throw InvalidSpec("monte carlo run: t_final and dt must be positive");
    }
    return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(t_final / dt)));
}

// Runs fn(sample, values) for every sample (values has one column per
// channel) and reduces mean / standard error per grid point and channel in a
// thread-count-independent order.
struct BlockedMoments {
    std::vector<VectorXd> mean;     // per channel, grid-sized
    std::vector<VectorXd> std_err;  // per channel, grid-sized
};

template <typename SampleFn>
BlockedMoments accumulate_blocked(Eigen::Index samples, Eigen::Index grid, int channels,
                                  int threads, SampleFn&& fn) {
    if (samples < 1) {
        throw InvalidSpec("monte carlo run: at least one sample is required");
    }
    const Eigen::Index nblocks = (samples + kSampleBlock - 1) / kSampleBlock;
    std::vector<MatrixXd> block_sum(static_cast<std::size_t>(channels),
                                    MatrixXd::Zero(grid, nblocks));
    std::vector<MatrixXd> block_sumsq(static_cast<std::size_t>(channels),
                                      MatrixXd::Zero(grid, nblocks));

    std::atomic<Eigen::Index> next_block{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    const auto worker = [&]() {
        MatrixXd values(grid, channels);
        for (;;) {
            const Eigen::Index b = next_block.fetch_add(1);
            if (b >= nblocks) return;
            const Eigen::Index lo = b * kSampleBlock;
            const Eigen::Index hi = std::min(samples, lo + kSampleBlock);
            try {
                for (Eigen::Index s = lo; s < hi; ++s) {
                    fn(s, values);
                    for (int j = 0; j < channels; ++j) {
                        block_sum[static_cast<std::size_t>(j)].col(b) += values.col(j);
                        block_sumsq[static_cast<std::size_t>(j)].col(b) +=
                            values.col(j).cwiseAbs2();
                    }
                }
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int nthreads = std::min<int>(resolve_threads(threads),
                                       static_cast<int>(nblocks));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    BlockedMoments out;
    out.mean.resize(static_cast<std::size_t>(channels));
    out.std_err.resize(static_cast<std::size_t>(channels));
    const double nd = static_cast<double>(samples);
    std::vector<double> scratch(static_cast<std::size_t>(nblocks));
    for (int j = 0; j < channels; ++j) {
        VectorXd mean(grid), se(grid);
        for (Eigen::Index g = 0; g < grid; ++g) {
            for (Eigen::Index b = 0; b < nblocks; ++b) {
                scratch[static_cast<std::size_t>(b)] = block_sum[static_cast<std::size_t>(j)](g, b);
            }
            const double sum = pairwise_sum(scratch);
            for (Eigen::Index b = 0; b < nblocks; ++b) {
                scratch[static_cast<std::size_t>(b)] =
                    block_sumsq[static_cast<std::size_t>(j)](g, b);
            }
            const double sumsq = pairwise_sum(scratch);
            mean(g) = sum / nd;
            const double var =
                samples > 1 ? std::max(0.0, (sumsq - nd * mean(g) * mean(g)) / (nd - 1.0))
                            : 0.0;
            se(g) = std::sqrt(var / nd);
        }
        out.mean[static_cast<std::size_t>(j)] = std::move(mean);
        out.std_err[static_cast<std::size_t>(j)] = std::move(se);
    }
    return out;
}

VectorXd make_times(Eigen::Index steps, double dt) {
    VectorXd times(steps + 1);
    for (Eigen::Index k = 0; k <= steps; ++k) times(k) = static_cast<double>(k) * dt;
    return times;
}

}  // namespace

const char* to_string(IntegrationMethod method) {
    return method == IntegrationMethod::ExpEuler ? "exp_euler" : "euler_maruyama";
}

MatrixXd integrate(const StateSpaceSystem& sys, const NoisePath& path, const VectorXd& x0,
                   IntegrationMethod method) {
    if (path.increments.rows() != sys.m()) {
        throw DimensionMismatch("integrate: path has " + std::to_string(path.increments.rows()) +
                                " components, system expects " + std::to_string(sys.m()));
    }
    if (x0.size() != sys.n()) {
        throw DimensionMismatch("integrate: x0 has wrong dimension");
    }
    const Eigen::Index steps = path.increments.cols();
    const Propagator prop = make_propagator(sys, path.dt, method);

    MatrixXd y(sys.p(), steps + 1);
    VectorXd x = x0;
    VectorXd scratch(sys.n());
    y.col(0).noalias() = sys.c * x;
    for (Eigen::Index k = 0; k < steps; ++k) {
        prop.apply(x, scratch);
        x.noalias() += sys.b * path.increments.col(k);
        y.col(k + 1).noalias() = sys.c * x;
    }
    if (!y.allFinite()) {
        throw NonFinite("integrate: trajectory diverged to non-finite values");
    }
    return y;
}

TrajectoryEnsemble simulate_ensemble(const StateSpaceSystem& sys, const NoiseSpec& spec,
                                     double t_final, double dt, Eigen::Index samples,
                                     std::uint64_t seed, IntegrationMethod method) {
    const Eigen::Index steps = grid_steps(t_final, dt);
    TrajectoryEnsemble ens;
    ens.times = make_times(steps, dt);
    ens.method = method;
    ens.outputs.reserve(static_cast<std::size_t>(samples));
    const VectorXd x0 = VectorXd::Zero(sys.n());
    for (Eigen::Index s = 0; s < samples; ++s) {
        const NoisePath path = sample_path(spec, dt, steps, seed, static_cast<std::uint64_t>(s));
        ens.outputs.push_back(integrate(sys, path, x0, method));
    }
    return ens;
}

McErrorEstimate McErrorRun::estimate() const {
    McErrorEstimate est;
    est.sample_count = sample_count;
    Eigen::Index argmax = 0;
    est.sup_mean_error = mean_err.maxCoeff(&argmax);
    est.argmax_time = times(argmax);
    est.std_error_at_argmax = std_err(argmax);
    return est;
}

std::vector<McErrorRun> mc_error_runs(const StateSpaceSystem& full,
                                      const std::vector<StateSpaceSystem>& roms,
                                      const NoiseSpec& spec, double t_final, double dt,
                                      Eigen::Index samples, std::uint64_t seed,
                                      IntegrationMethod full_method,
                                      IntegrationMethod rom_method, int threads) {
    require_stable(full.a, "mc_error_runs");
    for (const auto& rom : roms) {
        require_stable(rom.a, "mc_error_runs");
        if (rom.p() != full.p() || rom.m() != full.m()) {
            throw DimensionMismatch("mc_error_runs: reduced model input/output sizes differ "
                                    "from the full model");
        }
    }
    const Eigen::Index steps = grid_steps(t_final, dt);
    const int channels = static_cast<int>(roms.size());
    const VectorXd x0_full = VectorXd::Zero(full.n());

    const auto sample_fn = [&](Eigen::Index s, MatrixXd& values) {
        const NoisePath path = sample_path(spec, dt, steps, seed, static_cast<std::uint64_t>(s));
        const MatrixXd y_full = integrate(full, path, x0_full, full_method);
        for (int j = 0; j < channels; ++j) {
            const auto& rom = roms[static_cast<std::size_t>(j)];
            const MatrixXd y_rom =
                integrate(rom, path, VectorXd::Zero(rom.n()), rom_method);
            values.col(j) = (y_full - y_rom).colwise().norm().transpose();
        }
    };
    const BlockedMoments moments =
        accumulate_blocked(samples, steps + 1, channels, threads, sample_fn);

    std::vector<McErrorRun> runs(roms.size());
    const VectorXd times = make_times(steps, dt);
    for (std::size_t j = 0; j < roms.size(); ++j) {
        runs[j].times = times;
        runs[j].mean_err = moments.mean[j];
        runs[j].std_err = moments.std_err[j];
        runs[j].sample_count = samples;
    }
    return runs;
}

McErrorRun mc_error_run(const StateSpaceSystem& full, const StateSpaceSystem& rom,
                        const NoiseSpec& spec, double t_final, double dt,
                        Eigen::Index samples, std::uint64_t seed,
                        IntegrationMethod full_method, IntegrationMethod rom_method,
                        int threads) {
    return mc_error_runs(full, {rom}, spec, t_final, dt, samples, seed, full_method,
                         rom_method, threads)[0];
}

McErrorEstimate mc_sup_mean_error(const StateSpaceSystem& full, const StateSpaceSystem& rom,
                                  const NoiseSpec& spec, double t_final, double dt,
                                  Eigen::Index samples, std::uint64_t seed,
                                  IntegrationMethod full_method, IntegrationMethod rom_method,
                                  int threads) {
    if (samples < 2) {
        throw InvalidSpec("mc_sup_mean_error: at least two samples are required");
    }
    return mc_error_run(full, rom, spec, t_final, dt, samples, seed, full_method, rom_method,
                        threads)
        .estimate();
}

McMomentEstimate mc_state_projection_moment(const StateSpaceSystem& sys, const NoiseSpec& spec,
                                            const VectorXd& v, double t_final, double dt,
                                            Eigen::Index samples, std::uint64_t seed,
                                            IntegrationMethod method, int threads) {
    require_stable(sys.a, "mc_state_projection_moment");
    if (v.size() != sys.n()) {
        throw DimensionMismatch("mc_state_projection_moment: v has wrong dimension");
    }
    if (std::abs(v.norm() - 1.0) > 1e-8) {
        throw InvalidSpec("mc_state_projection_moment: v must be a unit vector");
    }
    const Eigen::Index steps = grid_steps(t_final, dt);
    const Propagator prop = make_propagator(sys, dt, method);

    const auto sample_fn = [&](Eigen::Index s, MatrixXd& values) {
        const NoisePath path = sample_path(spec, dt, steps, seed, static_cast<std::uint64_t>(s));
        VectorXd x = VectorXd::Zero(sys.n());
        VectorXd scratch(sys.n());
        values(0, 0) = 0.0;
        for (Eigen::Index k = 0; k < steps; ++k) {
            prop.apply(x, scratch);
            x.noalias() += sys.b * path.increments.col(k);
            const double proj = v.dot(x);
            values(k + 1, 0) = proj * proj;
        }
        if (!x.allFinite()) {
            throw NonFinite("mc_state_projection_moment: trajectory diverged");
        }
    };
    const BlockedMoments moments = accumulate_blocked(samples, steps + 1, 1, threads, sample_fn);

    McMomentEstimate est;
    est.sample_count = samples;
    Eigen::Index argmax = 0;
    est.value = moments.mean[0].maxCoeff(&argmax);
    est.argmax_time = static_cast<double>(argmax) * dt;
    est.std_error = moments.std_err[0](argmax);
    return est;
}

}  // namespace lsmor
