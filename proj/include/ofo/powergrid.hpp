#pragma once

#include "ofo/linalg.hpp"
#include "ofo/objective.hpp"
#include "ofo/plant.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ofo::grid {

/// DC network parameters. Nodes are 1-based in `edges`; each edge is oriented
/// from its lower to its higher node index.
struct GridSpec {
    int n_nodes = 8;
    std::vector<std::pair<int, int>> edges;
    Vector C_cap;   ///< node capacitances
    Vector L_ind;   ///< line inductances
    Vector R_line;  ///< line resistances
    Vector G_node;  ///< node conductances
    Vector I_star;  ///< reference injection
    Vector delta_I; ///< unknown injection change
    Vector d_meas;  ///< voltage measurement error
    double epsilon = 0.1;  ///< Euler step
    double gamma1 = 1.0;
    double gamma2 = 1.0;

    int n_edges() const noexcept { return static_cast<int>(edges.size()); }
    /// Throws ParseError naming the offending field.
    void validate() const;
};

/// 8 nodes, 9 lines: hub 4 -> {1,2,3}, hub 5 -> {6,7,8}, tie line (4,5) and
/// the lines (1,2), (6,7). Unit capacitance, inductance and conductance,
/// line resistance 10, unit I* and delta I, no measurement error,
/// epsilon = 0.1, gamma1 = gamma2 = 1.
GridSpec default_topology();

/// Same spec with every node conductance set to g.
GridSpec with_conductance(GridSpec spec, double g);

/// n x e, +1 at the lower-index endpoint and -1 at the higher one.
Matrix incidence_matrix(const GridSpec& spec);

/// Node degree (number of incident lines), 1-based node -> entry node-1.
std::vector<int> node_degrees(const GridSpec& spec);

/// Continuous-time generator K = [[-G, -B], [B^T, -R]] and E = diag(C, L).
struct ContinuousModel {
    Matrix E;
    Matrix K;
    Matrix input;  ///< [I; 0]
};

ContinuousModel continuous_model(const GridSpec& spec);

/// Steady-state voltage sensitivity of the continuous model,
/// H = -[I 0] K^{-1} [I; 0]. Independent of epsilon, E and of whether the
/// Euler discretization is stable.
Matrix continuous_sensitivity(const GridSpec& spec);

/// Discretized grid in deviation coordinates.
///
/// The physical state z = (V, f) is shifted by the steady state induced by
/// the uncontrolled injection I* - delta I, which turns that injection into
/// the constant output disturbance d = H (I* - delta I) + d_meas. The plant
/// input is the controllable injection I_c and the output is the measured
/// voltage.
struct GridModel {
    LtiPlant plant;
    SensitivityModel model;
    Vector disturbance;  ///< effective d of y = H I_c + d
    Vector y_ref;        ///< V_m,ref = H I* + d_meas
    Vector state_offset; ///< physical z = x + state_offset
};

/// Euler-forward discretization A = I + eps E^{-1} K, B = eps E^{-1} [I; 0],
/// C = [I 0], D = 0. Throws UnstableDiscretization if A is not Schur stable.
GridModel assemble_plant(const GridSpec& spec);

/// Quadratic tracking objective 1/2 (gamma1 |I_c|^2 + gamma2 |V_m - V_m,ref|^2).
SeparableObjective tracking_objective(const GridSpec& spec, const Vector& y_ref);

struct SweepRow {
    double g = 0.0;
    bool condition_satisfied = false;
    double condition_lhs = 0.0;
    double condition_rhs = 0.0;
    double true_rel_suboptimality = 0.0;  ///< |u* - u_inf| / |u*|
    double sim_rel_suboptimality = 0.0;   ///< from the simulated decentralized limit
    double tight_bound_rel = 0.0;
    bool tight_applicable = false;
    double paper_bound_rel = 0.0;
    bool paper_applicable = false;
    std::optional<double> xi_lambda_max;  ///< at 0.9 eta*, tight constants
    std::optional<double> eta_star;
    double spectral_radius = 0.0;  ///< of the Euler transition matrix
    std::vector<std::string> notes;  ///< per-row annotations, never fatal
};

/// For each G: assemble, solve u* and u_inf, run the decentralized algebraic
/// loop, and evaluate both versions of the sub-optimality bound. Rows whose
/// Euler discretization is unstable still carry every algebraic column (H from
/// the continuous steady state); LTI columns are then left empty.
std::vector<SweepRow> sweep_g(const GridSpec& base, const std::vector<double>& g_values,
                              double eta, std::size_t steps, bool parallel = false);

/// CSV with header
/// G,coupling_condition,lhs,rhs,true_rel,sim_rel,tight_bound_rel,tight_applicable,
/// paper_bound_rel,paper_applicable,xi_lambda_max,eta_star,spectral_radius,notes
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace ofo::grid
