#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lsmor/state_space.hpp"

namespace lsmor {

// Scalar forcing profile on [0, pi]: either one of the named built-ins or a
// tabulated sample set with linear interpolation.
class Forcing {
public:
    // Built-ins: "gauss"      -> 2 exp(-(z - pi/2)^2)
    //            "sine_gauss" -> sin(z) exp(-(z - pi/2)^2)
    static Forcing builtin(const std::string& name);
    static Forcing table(std::vector<double> zeta, std::vector<double> value);

    double operator()(double zeta) const { return eval_(zeta); }
    const std::string& description() const { return description_; }

private:
    Forcing(std::function<double(double)> eval, std::string description)
        : eval_(std::move(eval)), description_(std::move(description)) {}

    std::function<double(double)> eval_;
    std::string description_;
};

struct WaveConfig {
    Eigen::Index n = 1000;          // state dimension, even
    double alpha = 2.0;             // damping
    std::vector<Forcing> forcings;  // one per noise channel
    double window_halfwidth = 0.1;  // output averaging half-width
    int quad_nodes = 20000;

    static WaveConfig defaults();   // both built-in forcings, paper-scale sizes
    void validate() const;
};

// Composite Gauss-Legendre approximation of integral_0^pi f(z) sin(l z) dz
// with panels no wider than pi / (4 l). Requires quad_nodes >= 20 l.
double sine_coefficient(const std::function<double(double)>& f, int ell, int quad_nodes);

// Assembles the modal system: A = diag(E_1, ..., E_{n/2}) with
// E_l = [[0, l], [-l, -alpha]]; rows 2l of B carry sqrt(2/pi) <f_i, sin(l.)>
// (odd rows are zero); C holds the window averages of position and velocity.
StateSpaceSystem assemble_wave(const WaveConfig& config);

// Relative discrepancy of the steady-state output second moment
// tr(C P C^T) between two resolutions of the same configuration.
double galerkin_convergence_probe(const WaveConfig& config, const MatrixXd& q_m,
                                  Eigen::Index n_small, Eigen::Index n_large);

}  // namespace lsmor
