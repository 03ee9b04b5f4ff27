#include "lsmor/io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "lsmor/errors.hpp"

namespace lsmor {

namespace {

using nlohmann::json;

json matrix_to_flat(const MatrixXd& m) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            arr.push_back(m(i, j));
        }
    }
    return arr;
}

MatrixXd matrix_from_flat(const json& arr, Eigen::Index rows, Eigen::Index cols,
                          const char* name) {
    if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != rows * cols) {
        throw IoError(std::string("load_system_json: field '") + name + "' must hold " +
                      std::to_string(rows * cols) + " numbers");
    }
    MatrixXd m(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = arr[static_cast<std::size_t>(k++)].get<double>();
        }
    }
    return m;
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void save_system_json(const std::string& path, const StateSpaceSystem& sys,
                      const MatrixXd& q_m, const std::string& config_echo) {
    json j;
    j["n"] = sys.n();
    j["m"] = sys.m();
    j["p"] = sys.p();
    j["a"] = matrix_to_flat(sys.a);
    j["b"] = matrix_to_flat(sys.b);
    j["c"] = matrix_to_flat(sys.c);
    j["q_m"] = matrix_to_flat(q_m);
    if (!config_echo.empty()) j["config"] = config_echo;

    std::ofstream out(path);
    if (!out) {
        throw IoError("save_system_json: cannot open '" + path + "' for writing");
    }
    out << j.dump(1) << "\n";
    if (!out) {
        throw IoError("save_system_json: write to '" + path + "' failed");
    }
}

LoadedSystem load_system_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("load_system_json: cannot open '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw IoError("load_system_json: parse error in '" + path + "': " + e.what());
    }
    for (const char* field : {"n", "m", "p", "a", "b", "c", "q_m"}) {
        if (!j.contains(field)) {
            throw IoError(std::string("load_system_json: missing field '") + field + "'");
        }
    }
    const auto n = j["n"].get<Eigen::Index>();
    const auto m = j["m"].get<Eigen::Index>();
    const auto p = j["p"].get<Eigen::Index>();
    if (n < 0 || m < 0 || p < 0) {
        throw IoError("load_system_json: dimensions must be nonnegative");
    }
    LoadedSystem loaded;
    loaded.sys = StateSpaceSystem(matrix_from_flat(j["a"], n, n, "a"),
                                  matrix_from_flat(j["b"], n, m, "b"),
                                  matrix_from_flat(j["c"], p, n, "c"));
    loaded.q_m = matrix_from_flat(j["q_m"], m, m, "q_m");
    return loaded;
}

void write_csv(const std::string& path, const std::vector<std::string>& echo_lines,
               const std::string& header, const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("write_csv: cannot open '" + path + "' for writing");
    }
    for (const auto& line : echo_lines) {
        out << "# " << line << "\n";
    }
    out << header << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out << ",";
            out << format_double(row[i]);
        }
        out << "\n";
    }
    if (!out) {
        throw IoError("write_csv: write to '" + path + "' failed");
    }
}

void read_two_column_table(const std::string& path, std::vector<double>& first,
                           std::vector<double>& second) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("read_two_column_table: cannot open '" + path + "'");
    }
    first.clear();
    second.clear();
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        for (char& ch : line) {
            if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
        }
        std::istringstream ss(line);
        double a = 0.0, b = 0.0;
        if (ss >> a >> b) {
            first.push_back(a);
            second.push_back(b);
        }
    }
    if (first.size() < 2) {
        throw IoError("read_two_column_table: '" + path + "' holds fewer than two samples");
    }
}

}  // namespace lsmor
