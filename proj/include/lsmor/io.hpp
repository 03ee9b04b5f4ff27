#pragma once

#include <string>
#include <vector>

#include "lsmor/state_space.hpp"

namespace lsmor {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

// System files: flat row-major JSON
//   { "n":, "m":, "p":, "a":[...], "b":[...], "c":[...], "q_m":[...],
//     "config": "<echo of the producing command>" }
// Doubles are written with round-trip precision, so write-then-read
// reproduces every matrix exactly.
void save_system_json(const std::string& path, const StateSpaceSystem& sys,
                      const MatrixXd& q_m, const std::string& config_echo);

struct LoadedSystem {
    StateSpaceSystem sys;
    MatrixXd q_m;
};

LoadedSystem load_system_json(const std::string& path);

// CSV with '#'-prefixed echo lines, a header row, and round-trip doubles.
void write_csv(const std::string& path, const std::vector<std::string>& echo_lines,
               const std::string& header, const std::vector<std::vector<double>>& rows);

// Two-column numeric file (whitespace or comma separated, '#' comments).
void read_two_column_table(const std::string& path, std::vector<double>& first,
                           std::vector<double>& second);

}  // namespace lsmor
