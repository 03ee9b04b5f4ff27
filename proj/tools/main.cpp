// Command-line front end: assembles the damped-wave modal system, computes
// Gramians, reduced models and error bounds, and runs Monte Carlo error
// studies. Every output file echoes the producing configuration so runs are
// reproducible from the file alone.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lsmor/balancing.hpp"
#include "lsmor/bounds.hpp"
#include "lsmor/gramians.hpp"
#include "lsmor/io.hpp"
#include "lsmor/noise.hpp"
#include "lsmor/simulate.hpp"
#include "lsmor/state_space.hpp"
#include "lsmor/wave.hpp"

namespace {

using namespace lsmor;

constexpr double kPi = std::numbers::pi;

struct WaveOptions {
    Eigen::Index n = 1000;
    double alpha = 2.0;
    double eps_window = 0.1;
    int quad_nodes = 20000;
    std::vector<std::string> forcing_flags;
};

struct NoiseOptions {
    std::vector<std::string> flags;
};

struct SimOptions {
    double t_final = kPi;
    double dt = kPi / 4096.0;
    Eigen::Index samples = 1000;
    std::uint64_t seed = 42;
    int threads = 0;
};

std::vector<Forcing> parse_forcings(const std::vector<std::string>& flags) {
    if (flags.empty()) {
        return {Forcing::builtin("gauss"), Forcing::builtin("sine_gauss")};
    }
    std::vector<Forcing> forcings;
    for (const auto& flag : flags) {
        if (flag.rfind("table:", 0) == 0) {
            std::vector<double> zeta, value;
            read_two_column_table(flag.substr(6), zeta, value);
            forcings.push_back(Forcing::table(std::move(zeta), std::move(value)));
        } else {
            forcings.push_back(Forcing::builtin(flag));
        }
    }
    return forcings;
}

NoiseSpec parse_noise(const std::vector<std::string>& flags) {
    if (flags.empty()) return NoiseSpec::wave_default();
    NoiseSpec spec;
    for (const auto& flag : flags) {
        std::istringstream ss(flag);
        std::string kind;
        std::getline(ss, kind, ':');
        if (kind == "wiener") {
            double scale = 1.0;
            char colon = 0;
            if (!(ss >> scale) && !flag.ends_with("wiener")) {
                throw InvalidSpec("noise flag '" + flag + "': expected wiener:<scale>");
            }
            (void)colon;
            spec.components.push_back(ScaledWiener{scale});
        } else if (kind == "cpoisson") {
            std::string rate_s, width_s;
            if (!std::getline(ss, rate_s, ':') || !std::getline(ss, width_s, ':')) {
                throw InvalidSpec("noise flag '" + flag +
                                  "': expected cpoisson:<rate>:<halfwidth>");
            }
            spec.components.push_back(
                CompoundPoisson{std::stod(rate_s), std::stod(width_s)});
        } else {
            throw InvalidSpec("noise flag '" + flag + "': unknown kind '" + kind + "'");
        }
    }
    spec.validate();
    return spec;
}

std::string describe_noise(const NoiseSpec& spec) {
    std::string out;
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        if (i) out += ",";
        if (const auto* w = std::get_if<ScaledWiener>(&spec.components[i])) {
            out += "wiener:" + format_double(w->scale);
        } else {
            const auto& cp = std::get<CompoundPoisson>(spec.components[i]);
            out += "cpoisson:" + format_double(cp.rate) + ":" +
                   format_double(cp.jump_halfwidth);
        }
    }
    return out;
}

std::string describe_wave(const WaveOptions& wave, const std::vector<Forcing>& forcings) {
    std::string f;
    for (std::size_t i = 0; i < forcings.size(); ++i) {
        if (i) f += ",";
        f += forcings[i].description();
    }
    return "n=" + std::to_string(wave.n) + " alpha=" + format_double(wave.alpha) +
           " eps_window=" + format_double(wave.eps_window) +
           " quad_nodes=" + std::to_string(wave.quad_nodes) + " forcings=" + f;
}

StateSpaceSystem assemble_from_options(const WaveOptions& wave,
                                       const std::vector<Forcing>& forcings) {
    WaveConfig config;
    config.n = wave.n;
    config.alpha = wave.alpha;
    config.window_halfwidth = wave.eps_window;
    config.quad_nodes = wave.quad_nodes;
    config.forcings = forcings;
    return assemble_wave(config);
}

struct BalancedPipeline {
    StateSpaceSystem full;
    MatrixXd q_m;
    MinimalProjection proj;
    BalancedRealization bal;
    bool projected = false;
};

// Gramians, removal of numerically unreachable/unobservable directions, and
// the balancing transformation in one step.
BalancedPipeline prepare_balanced(const StateSpaceSystem& full, const MatrixXd& q_m) {
    BalancedPipeline pipe;
    pipe.full = full;
    pipe.q_m = q_m;
    const GramianSet gramians = compute_gramians(full, q_m);
    pipe.proj = project_minimal(full, gramians.p, gramians.q, default_rank_tol(full.n()));
    pipe.projected = pipe.proj.sys.n() != full.n();
    pipe.bal = balance(pipe.proj.sys, pipe.proj.p, pipe.proj.q);
    return pipe;
}

void write_hsv_csv(const std::string& path, const VectorXd& hsv, const std::string& echo) {
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(hsv.size()));
    for (Eigen::Index i = 0; i < hsv.size(); ++i) {
        rows.push_back({static_cast<double>(i + 1), hsv(i)});
    }
    write_csv(path, {echo}, "index,sigma", rows);
}

void write_matrix_csv(const std::string& path, const MatrixXd& m, const std::string& echo) {
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> row;
        row.reserve(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    std::ofstream out(path);
    if (!out) throw IoError("write_matrix_csv: cannot open '" + path + "'");
    out << "# " << echo << "\n";
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ",";
            out << format_double(row[j]);
        }
        out << "\n";
    }
}

StateSpaceSystem demo_system() {
    MatrixXd a(3, 3);
    a << -2.0, -4.0 / 3.0, -4.0 / 5.0,
         -4.0 / 3.0, -1.0, -2.0 / 3.0,
         -4.0 / 5.0, -2.0 / 3.0, -0.5;
    MatrixXd b(3, 1);
    b << 4.0, 2.0, 1.0;
    MatrixXd c(1, 3);
    c << 4.0, 2.0, 1.0;
    return StateSpaceSystem(std::move(a), std::move(b), std::move(c));
}

ReductionMethod parse_method(const std::string& method) {
    if (method == "bt") return ReductionMethod::BT;
    if (method == "spa") return ReductionMethod::SPA;
    throw InvalidSpec("method must be 'bt' or 'spa', got '" + method + "'");
}

int run_assemble(const WaveOptions& wave, const NoiseOptions& noise, const std::string& out) {
    const auto forcings = parse_forcings(wave.forcing_flags);
    const NoiseSpec spec = parse_noise(noise.flags);
    if (static_cast<Eigen::Index>(forcings.size()) != spec.dimension()) {
        throw InvalidSpec("assemble: " + std::to_string(forcings.size()) + " forcings vs " +
                          std::to_string(spec.dimension()) + " noise components");
    }
    const StateSpaceSystem sys = assemble_from_options(wave, forcings);
    const std::string echo = "lsmor assemble " + describe_wave(wave, forcings) +
                             " noise=" + describe_noise(spec);
    save_system_json(out, sys, covariance(spec), echo);
    std::cout << "wrote " << out << " (n=" << sys.n() << ", m=" << sys.m()
              << ", p=" << sys.p() << ")\n";
    return 0;
}

int run_gramians(const std::string& in, const std::string& prefix, bool deterministic) {
    const LoadedSystem loaded = load_system_json(in);
    const GramianSet set = compute_gramians(loaded.sys, loaded.q_m, deterministic);
    const std::string echo = "lsmor gramians in=" + in;
    write_matrix_csv(prefix + "_p.csv", set.p, echo);
    write_matrix_csv(prefix + "_q.csv", set.q, echo);
    if (set.p_det) write_matrix_csv(prefix + "_p_det.csv", *set.p_det, echo);
    std::cout << "tr(P)=" << format_double(set.p.trace())
              << " tr(Q)=" << format_double(set.q.trace())
              << " abscissa(A)=" << format_double(spectral_abscissa(loaded.sys.a)) << "\n";
    return 0;
}

int run_reduce(const std::string& in, const std::string& method_name, Eigen::Index r,
               const std::string& out, const std::string& hsv_out) {
    const LoadedSystem loaded = load_system_json(in);
    const ReductionMethod method = parse_method(method_name);
    const BalancedPipeline pipe = prepare_balanced(loaded.sys, loaded.q_m);
    const ReducedModel rom = method == ReductionMethod::BT ? reduce_bt(pipe.bal, r)
                                                           : reduce_spa(pipe.bal, r);
    const std::string echo = "lsmor reduce in=" + in + " method=" + method_name +
                             " r=" + std::to_string(r) +
                             (pipe.projected
                                  ? " projected_n=" + std::to_string(pipe.proj.sys.n())
                                  : "");
    save_system_json(out, rom.system, loaded.q_m, echo);
    write_hsv_csv(hsv_out, pipe.bal.hsv, echo);
    std::cout << "wrote " << out << " (r=" << r << ") and " << hsv_out << " ("
              << pipe.bal.hsv.size() << " values)\n";
    return 0;
}

int run_bound(const std::string& in, const std::string& method_name,
              std::vector<Eigen::Index> r_values, const std::string& out) {
    const LoadedSystem loaded = load_system_json(in);
    const BalancedPipeline pipe = prepare_balanced(loaded.sys, loaded.q_m);
    if (r_values.empty()) r_values = {2, 4, 8, 16, 32, 64};

    std::vector<std::string> methods;
    if (method_name == "both") {
        methods = {"bt", "spa"};
    } else {
        methods = {method_name};
    }
    std::ofstream file(out);
    if (!file) throw IoError("bound: cannot open '" + out + "'");
    file << "# lsmor bound in=" << in << " method=" << method_name
         << (pipe.projected ? " projected_n=" + std::to_string(pipe.proj.sys.n()) : "")
         << "\n";
    file << "r,method,bound,bound_general\n";
    for (const Eigen::Index r : r_values) {
        if (r >= pipe.bal.n()) continue;
        for (const auto& name : methods) {
            const BoundReport report = bound_report(pipe.bal, r, parse_method(name), pipe.q_m);
            file << r << "," << name << "," << format_double(report.eps_theorem) << ","
                 << format_double(report.eps_general) << "\n";
            std::cout << "r=" << r << " " << name << " bound=" << format_double(report.eps_theorem)
                      << "\n";
        }
    }
    return 0;
}

int run_simulate(const std::string& in, const std::string& rom_path, const NoiseOptions& noise,
                 const SimOptions& sim, const std::string& integrator, const std::string& out) {
    const LoadedSystem loaded = load_system_json(in);
    const NoiseSpec spec = parse_noise(noise.flags);
    if (spec.dimension() != loaded.sys.m()) {
        throw InvalidSpec("simulate: noise spec has " + std::to_string(spec.dimension()) +
                          " components, system expects " + std::to_string(loaded.sys.m()));
    }
    const IntegrationMethod method = integrator == "euler_maruyama"
                                         ? IntegrationMethod::EulerMaruyama
                                         : IntegrationMethod::ExpEuler;
    const std::string echo = "lsmor simulate in=" + in +
                             (rom_path.empty() ? "" : " rom=" + rom_path) +
                             " noise=" + describe_noise(spec) + " T=" + format_double(sim.t_final) +
                             " dt=" + format_double(sim.dt) +
                             " samples=" + std::to_string(sim.samples) +
                             " seed=" + std::to_string(sim.seed) + " integrator=" + integrator;

    if (rom_path.empty()) {
        // Single trajectory on stream 0.
        const TrajectoryEnsemble ens = simulate_ensemble(loaded.sys, spec, sim.t_final, sim.dt,
                                                         1, sim.seed, method);
        std::string header = "t";
        for (Eigen::Index i = 0; i < loaded.sys.p(); ++i) {
            header += ",y" + std::to_string(i + 1);
        }
        std::vector<std::vector<double>> rows;
        const MatrixXd& y = ens.outputs[0];
        for (Eigen::Index k = 0; k < ens.times.size(); ++k) {
            std::vector<double> row{ens.times(k)};
            for (Eigen::Index i = 0; i < y.rows(); ++i) row.push_back(y(i, k));
            rows.push_back(std::move(row));
        }
        write_csv(out, {echo}, header, rows);
        std::cout << "wrote " << out << " (" << ens.times.size() << " grid points)\n";
        return 0;
    }

    const LoadedSystem rom = load_system_json(rom_path);
    const McErrorRun run = mc_error_run(loaded.sys, rom.sys, spec, sim.t_final, sim.dt,
                                        sim.samples, sim.seed, method,
                                        IntegrationMethod::EulerMaruyama, sim.threads);
    std::vector<std::vector<double>> rows;
    for (Eigen::Index k = 0; k < run.times.size(); ++k) {
        rows.push_back({run.times(k), run.mean_err(k), run.std_err(k)});
    }
    write_csv(out, {echo}, "t,mean_err,std_err", rows);
    const McErrorEstimate est = run.estimate();
    std::cout << "sup mean error " << format_double(est.sup_mean_error) << " at t="
              << format_double(est.argmax_time) << " (se "
              << format_double(est.std_error_at_argmax) << ", " << est.sample_count
              << " samples)\n";
    return 0;
}

int run_table(const WaveOptions& wave, const NoiseOptions& noise, const SimOptions& sim,
              std::vector<Eigen::Index> sweep, const std::string& out) {
    const auto forcings = parse_forcings(wave.forcing_flags);
    const NoiseSpec spec = parse_noise(noise.flags);
    const StateSpaceSystem full = assemble_from_options(wave, forcings);
    const BalancedPipeline pipe = prepare_balanced(full, covariance(spec));
    if (sweep.empty()) sweep = {2, 4, 8, 16, 32, 64};

    std::vector<Eigen::Index> admissible;
    for (const Eigen::Index r : sweep) {
        if (r >= 1 && r < pipe.bal.n()) admissible.push_back(r);
    }

    struct Row {
        Eigen::Index r;
        double bound_bt, bound_spa;
        double err_bt = 0.0, se_bt = 0.0, err_spa = 0.0, se_spa = 0.0;
    };
    std::vector<Row> table;
    std::vector<StateSpaceSystem> roms;  // bt then spa per r
    for (const Eigen::Index r : admissible) {
        Row row{};
        row.r = r;
        const ReducedModel bt = reduce_bt(pipe.bal, r);
        const ReducedModel spa = reduce_spa(pipe.bal, r);
        row.bound_bt = bt_bound(pipe.bal, r, pipe.q_m);
        row.bound_spa = spa_bound(pipe.bal, r, pipe.q_m);
        roms.push_back(bt.system);
        roms.push_back(spa.system);
        table.push_back(row);
    }

    const std::string echo = "lsmor table " + describe_wave(wave, forcings) +
                             " noise=" + describe_noise(spec) + " T=" + format_double(sim.t_final) +
                             " dt=" + format_double(sim.dt) +
                             " samples=" + std::to_string(sim.samples) +
                             " seed=" + std::to_string(sim.seed) +
                             (pipe.projected
                                  ? " projected_n=" + std::to_string(pipe.bal.n())
                                  : "");

    if (sim.samples > 0) {
        const std::vector<McErrorRun> runs =
            mc_error_runs(pipe.full, roms, spec, sim.t_final, sim.dt, sim.samples, sim.seed,
                          IntegrationMethod::ExpEuler, IntegrationMethod::EulerMaruyama,
                          sim.threads);
        for (std::size_t i = 0; i < table.size(); ++i) {
            const McErrorEstimate bt = runs[2 * i].estimate();
            const McErrorEstimate spa = runs[2 * i + 1].estimate();
            table[i].err_bt = bt.sup_mean_error;
            table[i].se_bt = bt.std_error_at_argmax;
            table[i].err_spa = spa.sup_mean_error;
            table[i].se_spa = spa.std_error_at_argmax;
        }
        std::vector<std::vector<double>> rows;
        for (const Row& row : table) {
            rows.push_back({static_cast<double>(row.r), row.err_bt, row.se_bt, row.bound_bt,
                            row.err_spa, row.se_spa, row.bound_spa});
        }
        write_csv(out, {echo}, "r,err_bt,se_bt,bound_bt,err_spa,se_spa,bound_spa", rows);
    } else {
        std::vector<std::vector<double>> rows;
        for (const Row& row : table) {
            rows.push_back({static_cast<double>(row.r), row.bound_bt, row.bound_spa});
        }
        write_csv(out, {echo}, "r,bound_bt,bound_spa", rows);
    }
    std::cout << "wrote " << out << " (" << table.size() << " rows)\n";
    return 0;
}

int run_demo3x3(const std::string& hsv_out) {
    const StateSpaceSystem sys = demo_system();
    const MatrixXd q_m = MatrixXd::Identity(1, 1);
    const BalancedPipeline pipe = prepare_balanced(sys, q_m);
    write_hsv_csv(hsv_out, pipe.bal.hsv, "lsmor demo3x3");

    std::cout << "hsv:";
    for (Eigen::Index i = 0; i < pipe.bal.hsv.size(); ++i) {
        std::cout << " " << format_double(pipe.bal.hsv(i));
    }
    std::cout << "\n";

    const ReducedModel spa = reduce_spa(pipe.bal, 2);
    const MatrixXd p_r = reachability_gramian(spa.system, q_m);
    const MatrixXd q_r = observability_gramian(spa.system);
    const VectorXd rom_hsv = hankel_singular_values(p_r, q_r);
    std::cout << "spa r=2 reachability Gramian: [[" << format_double(p_r(0, 0)) << ", "
              << format_double(p_r(0, 1)) << "], [" << format_double(p_r(1, 0)) << ", "
              << format_double(p_r(1, 1)) << "]]\n";
    std::cout << "spa r=2 observability Gramian diag: " << format_double(q_r(0, 0)) << ", "
              << format_double(q_r(1, 1)) << "\n";
    std::cout << "spa r=2 rom hsv: " << format_double(rom_hsv(0)) << ", "
              << format_double(rom_hsv(1)) << "\n";
    for (const auto method : {ReductionMethod::BT, ReductionMethod::SPA}) {
        const BoundReport report = bound_report(pipe.bal, 2, method, q_m);
        std::cout << to_string(method) << " r=2 bound=" << format_double(report.eps_theorem)
                  << " (general " << format_double(report.eps_general) << ")\n";
    }
    std::cout << "wrote " << hsv_out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Balancing-based model reduction for linear SDEs with additive Levy noise"};
    app.require_subcommand(1);

    WaveOptions wave;
    NoiseOptions noise;
    SimOptions sim;
    std::string in_path, out_path, rom_path, hsv_out, prefix, method = "bt";
    std::string integrator = "exp_euler";
    std::vector<Eigen::Index> r_values;
    Eigen::Index r = 2;
    bool deterministic_gramian = false;

    const auto add_wave_options = [&](CLI::App* cmd) {
        cmd->add_option("--n", wave.n, "State dimension (even)");
        cmd->add_option("--alpha", wave.alpha, "Damping coefficient");
        cmd->add_option("--eps-window", wave.eps_window, "Output window half-width");
        cmd->add_option("--quad-nodes", wave.quad_nodes, "Quadrature resolution");
        cmd->add_option("--forcing", wave.forcing_flags,
                        "Forcing (gauss | sine_gauss | table:<path>); repeatable");
    };
    const auto add_noise_options = [&](CLI::App* cmd) {
        cmd->add_option("--noise", noise.flags,
                        "Noise component (wiener:<scale> | cpoisson:<rate>:<halfwidth>); "
                        "repeatable, defaults to the wave study pair");
    };
    const auto add_sim_options = [&](CLI::App* cmd) {
        cmd->add_option("--T", sim.t_final, "Final time");
        cmd->add_option("--dt", sim.dt, "Time step");
        cmd->add_option("--samples", sim.samples, "Monte Carlo sample count");
        cmd->add_option("--seed", sim.seed, "Base seed");
        cmd->add_option("--threads", sim.threads, "Worker threads (0 = hardware)");
    };

    auto* assemble = app.add_subcommand("assemble", "Assemble the modal wave system");
    add_wave_options(assemble);
    add_noise_options(assemble);
    assemble->add_option("--out", out_path, "Output system JSON")->default_val("system.json");

    auto* gramians = app.add_subcommand("gramians", "Compute reachability/observability Gramians");
    gramians->add_option("--in", in_path, "System JSON")->required();
    gramians->add_option("--out-prefix", prefix, "Output prefix")->default_val("gramian");
    gramians->add_flag("--deterministic", deterministic_gramian,
                       "Also write the identity-covariance Gramian");

    auto* reduce = app.add_subcommand("reduce", "Compute a reduced model");
    reduce->add_option("--in", in_path, "System JSON")->required();
    reduce->add_option("--method", method, "bt | spa")->default_val("bt");
    reduce->add_option("--r", r, "Reduced order")->required();
    reduce->add_option("--out", out_path, "Output ROM JSON")->default_val("rom.json");
    reduce->add_option("--hsv-out", hsv_out, "Hankel singular value CSV")->default_val("hsv.csv");

    auto* bound = app.add_subcommand("bound", "Evaluate output error bounds");
    bound->add_option("--in", in_path, "System JSON")->required();
    bound->add_option("--method", method, "bt | spa | both")->default_val("both");
    bound->add_option("--r", r_values, "Reduced orders (repeatable)");
    bound->add_option("--out", out_path, "Output CSV")->default_val("bounds.csv");

    auto* simulate = app.add_subcommand("simulate", "Simulate a trajectory or an error ensemble");
    simulate->add_option("--in", in_path, "System JSON")->required();
    simulate->add_option("--rom", rom_path, "ROM JSON; enables the error ensemble");
    add_noise_options(simulate);
    add_sim_options(simulate);
    simulate->add_option("--integrator", integrator, "exp_euler | euler_maruyama")
        ->default_val("exp_euler");
    simulate->add_option("--out", out_path, "Output CSV")->default_val("trajectory.csv");

    auto* table = app.add_subcommand("table", "Bounds and Monte Carlo errors over an r sweep");
    add_wave_options(table);
    add_noise_options(table);
    add_sim_options(table);
    table->add_option("--r-sweep", r_values, "Reduced orders (repeatable)");
    table->add_option("--out", out_path, "Output CSV")->default_val("table.csv");

    auto* demo = app.add_subcommand("demo3x3", "Run the bundled 3x3 worked example");
    demo->add_option("--hsv-out", hsv_out, "Hankel singular value CSV")->default_val("hsv.csv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (assemble->parsed()) return run_assemble(wave, noise, out_path);
        if (gramians->parsed()) return run_gramians(in_path, prefix, deterministic_gramian);
        if (reduce->parsed()) return run_reduce(in_path, method, r, out_path, hsv_out);
        if (bound->parsed()) return run_bound(in_path, method, r_values, out_path);
        if (simulate->parsed())
            return run_simulate(in_path, rom_path, noise, sim, integrator, out_path);
        if (table->parsed()) return run_table(wave, noise, sim, r_values, out_path);
        if (demo->parsed()) return run_demo3x3(hsv_out);
    } catch (const Error& e) {
        nlohmann::json err{{"error", e.category()}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", "internal"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
