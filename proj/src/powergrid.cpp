#include "ofo/powergrid.hpp"

#include "ofo/analysis.hpp"
#include "ofo/equilibria.hpp"
#include "ofo/errors.hpp"
#include "ofo/io.hpp"
#include "ofo/sim.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <numeric>
#include <set>

namespace ofo::grid {

namespace {

void require_positive(const Vector& v, Eigen::Index n, const char* key) {
    if (v.size() != n) throw ParseError(key, "expected length " + std::to_string(n));
    if (!v.allFinite() || (v.array() <= 0.0).any())
        throw ParseError(key, "entries must be strictly positive");
}

void require_length(const Vector& v, Eigen::Index n, const char* key) {
    if (v.size() != n) throw ParseError(key, "expected length " + std::to_string(n));
    if (!v.allFinite()) throw ParseError(key, "entries must be finite");
}

}  // namespace

void GridSpec::validate() const {
    if (n_nodes < 2) throw ParseError("n_nodes", "need at least two nodes");
    if (edges.empty()) throw ParseError("edges", "need at least one edge");
    std::set<std::pair<int, int>> seen;
    // union-find for connectivity
    std::vector<int> parent(static_cast<size_t>(n_nodes));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](int a) {
        while (parent.at(static_cast<size_t>(a)) != a) a = parent.at(static_cast<size_t>(a));
        return a;
    };
    for (const auto& [a, b] : edges) {
        if (a < 1 || b < 1 || a > n_nodes || b > n_nodes || a == b)
            throw ParseError("edges", "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                          ") is not a pair of distinct nodes in 1.." +
                                          std::to_string(n_nodes));
        if (!seen.insert({std::min(a, b), std::max(a, b)}).second)
            throw ParseError("edges", "duplicate edge (" + std::to_string(a) + "," +
                                          std::to_string(b) + ")");
        parent[static_cast<size_t>(find(a - 1))] = find(b - 1);
    }
    for (int v = 1; v < n_nodes; ++v)
        if (find(v) != find(0)) throw ParseError("edges", "graph is not connected");

    const Eigen::Index n = n_nodes;
    const Eigen::Index e = n_edges();
    require_positive(C_cap, n, "C_cap");
    require_positive(G_node, n, "G_node");
    require_positive(L_ind, e, "L_ind");
    require_positive(R_line, e, "R_line");
    require_length(I_star, n, "I_star");
    require_length(delta_I, n, "delta_I");
    require_length(d_meas, n, "d_meas");
    if (!(epsilon > 0.0)) throw ParseError("epsilon", "must be positive");
    if (!(gamma1 > 0.0)) throw ParseError("gamma1", "must be positive");
    if (!(gamma2 > 0.0)) throw ParseError("gamma2", "must be positive");
}

GridSpec default_topology() {
    GridSpec s;
    s.n_nodes = 8;
    s.edges = {{1, 4}, {2, 4}, {3, 4}, {5, 6}, {5, 7}, {5, 8}, {4, 5}, {1, 2}, {6, 7}};
    const Eigen::Index n = 8, e = 9;
    s.C_cap = Vector::Ones(n);
    s.L_ind = Vector::Ones(e);
    s.R_line = Vector::Constant(e, 10.0);
    s.G_node = Vector::Ones(n);
    s.I_star = Vector::Ones(n);
    s.delta_I = Vector::Ones(n);
    s.d_meas = Vector::Zero(n);
    s.epsilon = 0.1;
    s.gamma1 = 1.0;
    s.gamma2 = 1.0;
    return s;
}

GridSpec with_conductance(GridSpec spec, double g) {
    spec.G_node = Vector::Constant(spec.n_nodes, g);
    return spec;
}

Matrix incidence_matrix(const GridSpec& spec) {
    Matrix B = Matrix::Zero(spec.n_nodes, spec.n_edges());
    for (int j = 0; j < spec.n_edges(); ++j) {
        const auto [a, b] = spec.edges[static_cast<size_t>(j)];
        B(std::min(a, b) - 1, j) = 1.0;
        B(std::max(a, b) - 1, j) = -1.0;
    }
    return B;
}

std::vector<int> node_degrees(const GridSpec& spec) {
    std::vector<int> deg(static_cast<size_t>(spec.n_nodes), 0);
    for (const auto& [a, b] : spec.edges) {
        ++deg[static_cast<size_t>(a - 1)];
        ++deg[static_cast<size_t>(b - 1)];
    }
    return deg;
}

ContinuousModel continuous_model(const GridSpec& spec) {
    spec.validate();
    const Eigen::Index n = spec.n_nodes;
    const Eigen::Index e = spec.n_edges();
    const Matrix B = incidence_matrix(spec);

    ContinuousModel cm;
    cm.E = Matrix::Zero(n + e, n + e);
    cm.E.diagonal() << spec.C_cap, spec.L_ind;
    // Node balance C dV/dt = -G V - B f + I; line dynamics L df/dt = B^T V - R f.
    cm.K = Matrix::Zero(n + e, n + e);
    cm.K.topLeftCorner(n, n) = -Matrix(spec.G_node.asDiagonal());
    cm.K.topRightCorner(n, e) = -B;
    cm.K.bottomLeftCorner(e, n) = B.transpose();
    cm.K.bottomRightCorner(e, e) = -Matrix(spec.R_line.asDiagonal());
    cm.input = Matrix::Zero(n + e, n);
    cm.input.topRows(n) = Matrix::Identity(n, n);
    return cm;
}

Matrix continuous_sensitivity(const GridSpec& spec) {
    const ContinuousModel cm = continuous_model(spec);
    const Eigen::Index n = spec.n_nodes;
    const Matrix z = cm.K.partialPivLu().solve(cm.input);
    return -z.topRows(n);
}

GridModel assemble_plant(const GridSpec& spec) {
    const ContinuousModel cm = continuous_model(spec);
    const Eigen::Index n = spec.n_nodes;
    const Eigen::Index states = cm.K.rows();
    const Vector e_inv = cm.E.diagonal().cwiseInverse();

    Matrix A = Matrix::Identity(states, states) + spec.epsilon * e_inv.asDiagonal() * cm.K;
    Matrix B = spec.epsilon * e_inv.asDiagonal() * cm.input;
    Matrix C = Matrix::Zero(n, states);
    C.leftCols(n) = Matrix::Identity(n, n);
    Matrix D = Matrix::Zero(n, n);

    const SchurStability stab = is_schur_stable(A);
    if (!stab.stable) throw UnstableDiscretization(stab.spectral_radius);

    SensitivityModel model = compute_sensitivity(A, B, C, D);
    const Vector uncontrolled = spec.I_star - spec.delta_I;
    Vector disturbance = model.H * uncontrolled + spec.d_meas;
    Vector y_ref = model.H * spec.I_star + spec.d_meas;
    Vector offset = model.H_x * uncontrolled;
    LtiPlant plant(std::move(A), std::move(B), std::move(C), std::move(D), disturbance);
    return GridModel{std::move(plant), std::move(model), std::move(disturbance), std::move(y_ref),
                     std::move(offset)};
}

SeparableObjective tracking_objective(const GridSpec& spec, const Vector& y_ref) {
    return make_quadratic_objective(spec.gamma1, spec.gamma2, y_ref);
}

namespace {

SweepRow sweep_row(const GridSpec& base, double g, double eta, std::size_t steps) {
    SweepRow row;
    row.g = g;
    try {
        const GridSpec spec = with_conductance(base, g);
        std::optional<GridModel> gm;
        SensitivityModel model;
        Vector disturbance, y_ref;
        try {
            gm.emplace(assemble_plant(spec));
            model = gm->model;
            disturbance = gm->disturbance;
            y_ref = gm->y_ref;
            row.spectral_radius = gm->plant.spectral_radius();
        } catch (const UnstableDiscretization& e) {
            row.spectral_radius = e.spectral_radius();
            row.notes.push_back("unstable Euler discretization; H from continuous steady state");
            model = SensitivityModel::from_map(continuous_sensitivity(spec));
            disturbance = model.H * (spec.I_star - spec.delta_I) + spec.d_meas;
            y_ref = model.H * spec.I_star + spec.d_meas;
        }

        const SeparableObjective obj = tracking_objective(spec, y_ref);
        const CouplingCondition cc = coupling_condition(obj, model);
        row.condition_satisfied = cc.satisfied;
        row.condition_lhs = cc.lhs;
        row.condition_rhs = cc.rhs;
        if (!cc.satisfied) row.notes.push_back("coupling condition fails");

        const auto u_star = global_optimum(obj, model, disturbance);
        const auto u_inf = decentralized_fixed_point(obj, model, disturbance);
        const double scale = u_star.u.norm();
        row.true_rel_suboptimality = (u_star.u - u_inf.u).norm() / scale;

        const auto tight = monotonicity_constants(obj, model, Convention::Tight);
        const auto paper = monotonicity_constants(obj, model, Convention::Paper);
        const auto tb = suboptimality_bound(obj, model, disturbance, u_inf.u, tight);
        const auto pb = suboptimality_bound(obj, model, disturbance, u_inf.u, paper);
        row.tight_bound_rel = tb.bound / scale;
        row.tight_applicable = tb.applicable;
        row.paper_bound_rel = pb.bound / scale;
        row.paper_applicable = pb.applicable;

        try {
            const Trajectory traj =
                run_algebraic(model, obj, disturbance, {Mode::Decentralized, eta},
                              Vector::Zero(model.n_agents()), {steps, 1e-12});
            row.sim_rel_suboptimality = (u_star.u - traj.u.back()).norm() / scale;
            if (!traj.info.converged) row.notes.push_back("decentralized run hit the step cap");
        } catch (const NonFinite& e) {
            row.sim_rel_suboptimality = std::numeric_limits<double>::quiet_NaN();
            row.notes.push_back(e.what());
        }

        if (gm) {
            try {
                const auto es = eta_star(gm->plant, obj, model, Convention::Tight);
                row.eta_star = es.eta_star;
                row.xi_lambda_max =
                    xi_matrix(gm->plant, obj, model, 0.9 * es.eta_star, Convention::Tight).lambda_max;
            } catch (const Error& e) {
                row.notes.push_back(std::string("no LTI certificate: ") + e.what());
            }
        }
    } catch (const Error& e) {
        row.notes.push_back(e.what());
    }
    return row;
}

}  // namespace

std::vector<SweepRow> sweep_g(const GridSpec& base, const std::vector<double>& g_values,
                              double eta, std::size_t steps, bool parallel) {
    std::vector<SweepRow> rows;
    rows.reserve(g_values.size());
    if (!parallel) {
        for (double g : g_values) rows.push_back(sweep_row(base, g, eta, steps));
        return rows;
    }
    std::vector<std::future<SweepRow>> jobs;
    for (double g : g_values)
        jobs.push_back(std::async(std::launch::async, sweep_row, std::cref(base), g, eta, steps));
    for (auto& j : jobs) rows.push_back(j.get());
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    using io::format_number;
    std::string out =
        "G,coupling_condition,lhs,rhs,true_rel,sim_rel,tight_bound_rel,tight_applicable,paper_bound_rel,"
        "paper_applicable,xi_lambda_max,eta_star,spectral_radius,notes\n";
    for (const auto& r : rows) {
        std::string notes;
        for (const auto& n : r.notes) {
            if (!notes.empty()) notes += "; ";
            notes += n;
        }
        std::replace(notes.begin(), notes.end(), '"', '\'');
        out += format_number(r.g) + ',' + (r.condition_satisfied ? "1" : "0") + ',' +
               format_number(r.condition_lhs) + ',' + format_number(r.condition_rhs) + ',' +
               format_number(r.true_rel_suboptimality) + ',' +
               format_number(r.sim_rel_suboptimality) + ',' + format_number(r.tight_bound_rel) +
               ',' + (r.tight_applicable ? "1" : "0") + ',' + format_number(r.paper_bound_rel) +
               ',' + (r.paper_applicable ? "1" : "0") + ',' +
               (r.xi_lambda_max ? format_number(*r.xi_lambda_max) : "") + ',' +
               (r.eta_star ? format_number(*r.eta_star) : "") + ',' +
               format_number(r.spectral_radius) + ",\"" + notes + "\"\n";
    }
    return out;
}

}  // namespace ofo::grid
