#include "lsmor/wave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lsmor/errors.hpp"
#include "lsmor/gramians.hpp"

namespace lsmor {

namespace {

constexpr double kPi = std::numbers::pi;

// 10-point Gauss-Legendre rule on [-1, 1].
constexpr int kGlOrder = 10;
constexpr double kGlNode[kGlOrder] = {
    -0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
    -0.4333953941292472, -0.1488743389816312, 0.1488743389816312,
    0.4333953941292472,  0.6794095682990244,  0.8650633666889845,
    0.9739065285171717};
constexpr double kGlWeight[kGlOrder] = {
    0.0666713443086881, 0.1494513491505806, 0.2190863625159820,
    0.2692667193099963, 0.2955242247147529, 0.2955242247147529,
    0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
    0.0666713443086881};

// sin(l pi / 2) evaluated exactly from l mod 4.
double sin_half_pi(int ell) {
    switch (((ell % 4) + 4) % 4) {
        case 1: return 1.0;
        case 3: return -1.0;
        default: return 0.0;
    }
}

}  // namespace

Forcing Forcing::builtin(const std::string& name) {
    if (name == "gauss") {
        return Forcing([](double z) { return 2.0 * std::exp(-(z - kPi / 2) * (z - kPi / 2)); },
                       "gauss");
    }
    if (name == "sine_gauss") {
        return Forcing(
            [](double z) { return std::sin(z) * std::exp(-(z - kPi / 2) * (z - kPi / 2)); },
            "sine_gauss");
    }
    throw InvalidSpec("Forcing::builtin: unknown name '" + name +
                      "' (expected gauss or sine_gauss)");
}

Forcing Forcing::table(std::vector<double> zeta, std::vector<double> value) {
    if (zeta.size() != value.size() || zeta.size() < 2) {
        throw InvalidSpec("Forcing::table: need at least two matching samples");
    }
    if (!std::is_sorted(zeta.begin(), zeta.end())) {
        throw InvalidSpec("Forcing::table: abscissae must be increasing");
    }
    // Allow truncated-decimal endpoints; evaluation clamps to the table range.
    if (zeta.front() > 1e-4 || zeta.back() < kPi - 1e-4) {
        throw InvalidSpec("Forcing::table: samples must cover [0, pi]");
    }
    auto eval = [zeta = std::move(zeta), value = std::move(value)](double z) {
        const auto it = std::upper_bound(zeta.begin(), zeta.end(), z);
        if (it == zeta.begin()) return value.front();
        if (it == zeta.end()) return value.back();
        const std::size_t hi = static_cast<std::size_t>(it - zeta.begin());
        const std::size_t lo = hi - 1;
        const double t = (z - zeta[lo]) / (zeta[hi] - zeta[lo]);
        return (1.0 - t) * value[lo] + t * value[hi];
    };
    return Forcing(std::move(eval), "table");
}

WaveConfig WaveConfig::defaults() {
    WaveConfig config;
    config.forcings = {Forcing::builtin("gauss"), Forcing::builtin("sine_gauss")};
    return config;
}

void WaveConfig::validate() const {
    if (n <= 0 || n % 2 != 0) {
        throw InvalidSpec("WaveConfig: n must be a positive even integer, got " +
                          std::to_string(n));
    }
    if (!(alpha > 0.0)) {
        throw InvalidSpec("WaveConfig: alpha must be positive");
    }
    if (forcings.empty()) {
        throw InvalidSpec("WaveConfig: at least one forcing is required");
    }
    if (!(window_halfwidth > 0.0) || !(window_halfwidth < kPi / 2)) {
        throw InvalidSpec("WaveConfig: window_halfwidth must lie in (0, pi/2)");
    }
    if (quad_nodes < 10 * n) {
        throw ResolutionTooLow("WaveConfig: quad_nodes must be at least 20 * (n/2)");
    }
}

double sine_coefficient(const std::function<double(double)>& f, int ell, int quad_nodes) {
    if (ell < 1) {
        throw InvalidSpec("sine_coefficient: mode index must be positive");
    }
    if (quad_nodes < 20 * ell) {
        throw ResolutionTooLow("sine_coefficient: quad_nodes=" + std::to_string(quad_nodes) +
                               " is below 20 * l = " + std::to_string(20 * ell));
    }
    // At least four panels per oscillation period of sin(l z).
    const int panels = std::max((quad_nodes + kGlOrder - 1) / kGlOrder, 4 * ell);
    const double h = kPi / panels;
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double mid = (k + 0.5) * h;
        double panel = 0.0;
        for (int j = 0; j < kGlOrder; ++j) {
            const double z = mid + 0.5 * h * kGlNode[j];
            panel += kGlWeight[j] * f(z) * std::sin(ell * z);
        }
        sum += panel * 0.5 * h;
    }
    return sum;
}

StateSpaceSystem assemble_wave(const WaveConfig& config) {
    config.validate();
    const Eigen::Index n = config.n;
    const Eigen::Index half = n / 2;
    const Eigen::Index m = static_cast<Eigen::Index>(config.forcings.size());
    const double eps = config.window_halfwidth;

    MatrixXd a = MatrixXd::Zero(n, n);
    MatrixXd b = MatrixXd::Zero(n, m);
    MatrixXd c = MatrixXd::Zero(2, n);

    const double scale = std::sqrt(2.0 / kPi);
    for (Eigen::Index lblk = 1; lblk <= half; ++lblk) {
        const int ell = static_cast<int>(lblk);
        const Eigen::Index row = 2 * (lblk - 1);
        a(row, row + 1) = ell;
        a(row + 1, row) = -ell;
        a(row + 1, row + 1) = -config.alpha;

        for (Eigen::Index i = 0; i < m; ++i) {
            b(row + 1, i) =
                scale * sine_coefficient(config.forcings[static_cast<std::size_t>(i)], ell,
                                         config.quad_nodes);
        }

        // cos(l (pi/2 - eps)) - cos(l (pi/2 + eps)) = 2 sin(l pi/2) sin(l eps);
        // the product form keeps even-mode entries exactly zero.
        const double dcos = 2.0 * sin_half_pi(ell) * std::sin(ell * eps);
        const double base = 1.0 / (std::sqrt(2.0 * kPi) * eps);
        c(0, row) = base / (static_cast<double>(ell) * ell) * dcos;
        c(1, row + 1) = base / static_cast<double>(ell) * dcos;
    }
    return StateSpaceSystem(std::move(a), std::move(b), std::move(c));
}

double galerkin_convergence_probe(const WaveConfig& config, const MatrixXd& q_m,
                                  Eigen::Index n_small, Eigen::Index n_large) {
    if (n_small > n_large) {
        throw InvalidSpec("galerkin_convergence_probe: n_small must not exceed n_large");
    }
    const auto moment = [&](Eigen::Index n) {
        WaveConfig local = config;
        local.n = n;
        local.quad_nodes = std::max(config.quad_nodes, static_cast<int>(10 * n));
        const StateSpaceSystem sys = assemble_wave(local);
        const MatrixXd p = reachability_gramian(sys, q_m);
        return (sys.c * p * sys.c.transpose()).trace();
    };
    const double coarse = moment(n_small);
    if (n_small == n_large) return 0.0;
    const double fine = moment(n_large);
    return std::abs(coarse - fine) / std::abs(fine);
}

}  // namespace lsmor
