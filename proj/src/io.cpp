#include "ofo/io.hpp"

#include "ofo/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ofo::io {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

double parse_entry(const Json& v, std::string_view key) {
    if (!v.is_number()) throw ParseError(std::string(key), "entries must be numbers");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ParseError(std::string(key), "entries must be finite");
    return x;
}

const Json& require_key(const Json& node, const char* key) {
    if (!node.is_object() || !node.contains(key)) throw ParseError(key, "missing required key");
    return node.at(key);
}

}  // namespace

Matrix parse_matrix(const Json& node, std::string_view key) {
    if (!node.is_array() || node.empty())
        throw ParseError(std::string(key), "expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(node.size());
    if (!node[0].is_array() || node[0].empty())
        throw ParseError(std::string(key), "expected a non-empty array of rows");
    const auto cols = static_cast<Eigen::Index>(node[0].size());
    Matrix M(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Json& row = node[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ParseError(std::string(key), "rows must all have length " + std::to_string(cols));
        for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = parse_entry(row[static_cast<size_t>(c)], key);
    }
    return M;
}

Vector parse_vector(const Json& node, std::string_view key) {
    if (!node.is_array()) throw ParseError(std::string(key), "expected an array of numbers");
    Vector v(static_cast<Eigen::Index>(node.size()));
    for (size_t i = 0; i < node.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_entry(node[i], key);
    return v;
}

Json to_json(const Matrix& M) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

LtiPlant plant_from_json(const Json& node) {
    Matrix A = parse_matrix(require_key(node, "A"), "A");
    Matrix B = parse_matrix(require_key(node, "B"), "B");
    Matrix C = parse_matrix(require_key(node, "C"), "C");
    Matrix D = parse_matrix(require_key(node, "D"), "D");
    Vector d = parse_vector(require_key(node, "d"), "d");

    const Eigen::Index n = A.rows();
    const Eigen::Index N = D.rows();
    if (A.cols() != n) throw ParseError("A", "must be square");
    if (D.cols() != N) throw ParseError("D", "must be square");
    if (B.rows() != n || B.cols() != N)
        throw ParseError("B", "expected " + std::to_string(n) + "x" + std::to_string(N));
    if (C.rows() != N || C.cols() != n)
        throw ParseError("C", "expected " + std::to_string(N) + "x" + std::to_string(n));
    if (d.size() != N) throw ParseError("d", "expected length " + std::to_string(N));
    return LtiPlant(std::move(A), std::move(B), std::move(C), std::move(D), std::move(d));
}

Json plant_to_json(const LtiPlant& plant) {
    return Json{{"A", to_json(plant.A())},
                {"B", to_json(plant.B())},
                {"C", to_json(plant.C())},
                {"D", to_json(plant.D())},
                {"d", to_json(plant.d())}};
}

grid::GridSpec grid_from_json(const Json& node) {
    if (!node.is_object()) throw ParseError("grid", "expected an object");
    grid::GridSpec spec = grid::default_topology();
    auto vec = [&](const char* key, Vector& target) {
        if (node.contains(key)) target = parse_vector(node.at(key), key);
    };
    auto num = [&](const char* key, double& target) {
        if (node.contains(key)) target = parse_entry(node.at(key), key);
    };
    if (node.contains("n_nodes")) {
        const Json& n = node.at("n_nodes");
        if (!n.is_number_integer()) throw ParseError("n_nodes", "expected an integer");
        spec.n_nodes = n.get<int>();
    }
    if (node.contains("edges")) {
        const Json& e = node.at("edges");
        if (!e.is_array()) throw ParseError("edges", "expected an array of node pairs");
        spec.edges.clear();
        for (const Json& pair : e) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
                !pair[1].is_number_integer())
                throw ParseError("edges", "each edge must be a pair of integer node ids");
            spec.edges.emplace_back(pair[0].get<int>(), pair[1].get<int>());
        }
    }
    vec("C_cap", spec.C_cap);
    vec("L_ind", spec.L_ind);
    vec("R_line", spec.R_line);
    vec("G_node", spec.G_node);
    vec("I_star", spec.I_star);
    vec("delta_I", spec.delta_I);
    vec("d_meas", spec.d_meas);
    num("epsilon", spec.epsilon);
    num("gamma1", spec.gamma1);
    num("gamma2", spec.gamma2);
    spec.validate();
    return spec;
}

Json grid_to_json(const grid::GridSpec& spec) {
    Json edges = Json::array();
    for (const auto& [a, b] : spec.edges) edges.push_back({a, b});
    return Json{{"n_nodes", spec.n_nodes},   {"edges", edges},
                {"C_cap", to_json(spec.C_cap)},  {"L_ind", to_json(spec.L_ind)},
                {"R_line", to_json(spec.R_line)}, {"G_node", to_json(spec.G_node)},
                {"I_star", to_json(spec.I_star)}, {"delta_I", to_json(spec.delta_I)},
                {"d_meas", to_json(spec.d_meas)}, {"epsilon", spec.epsilon},
                {"gamma1", spec.gamma1},         {"gamma2", spec.gamma2}};
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open file");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(path, e.what());
    }
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string trajectory_csv(const Trajectory& traj, const ErrorMetrics& rel,
                           const ErrorMetrics* combined, std::size_t decimation) {
    if (decimation == 0) decimation = 1;
    const bool with_x = !traj.x.empty();
    const bool with_combined = combined != nullptr && combined->combined_sq.has_value();
    std::string out;
    out += "k";
    if (!traj.u.empty()) {
        const auto N = traj.u.front().size();
        for (Eigen::Index i = 1; i <= N; ++i) out += ",u_" + std::to_string(i);
        for (Eigen::Index i = 1; i <= N; ++i) out += ",y_" + std::to_string(i);
        if (with_x)
            for (Eigen::Index i = 1; i <= traj.x.front().size(); ++i) out += ",x_" + std::to_string(i);
    }
    out += ",rel_err_u";
    if (with_combined) out += ",combined_sq";
    out += '\n';

    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (k % decimation != 0 && k + 1 != traj.size()) continue;
        out += std::to_string(k);
        for (Eigen::Index i = 0; i < traj.u[k].size(); ++i) out += ',' + format_number(traj.u[k](i));
        for (Eigen::Index i = 0; i < traj.y[k].size(); ++i) out += ',' + format_number(traj.y[k](i));
        if (with_x)
            for (Eigen::Index i = 0; i < traj.x[k].size(); ++i) out += ',' + format_number(traj.x[k](i));
        out += ',' + format_number(rel.rel_err_u.at(k));
        if (with_combined) out += ',' + format_number(combined->combined_sq->at(k));
        out += '\n';
    }
    return out;
}

}  // namespace ofo::io
