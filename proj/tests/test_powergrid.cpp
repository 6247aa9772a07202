#include <doctest.h>

#include "ofo/analysis.hpp"
#include "ofo/equilibria.hpp"
#include "ofo/errors.hpp"
#include "ofo/powergrid.hpp"
#include "ofo/sim.hpp"

#include <cmath>

using namespace ofo;
using namespace ofo::grid;

namespace {

/// Euler simulation of the physical grid, independent of assemble_plant.
Vector physical_voltage(const GridSpec& spec, const Vector& I_c, int steps) {
    const int n = spec.n_nodes;
    const int e = spec.n_edges();
    const Matrix Bi = incidence_matrix(spec);
    Vector V = Vector::Zero(n), f = Vector::Zero(e);
    const Vector injection = I_c + spec.I_star - spec.delta_I;
    for (int k = 0; k < steps; ++k) {
        const Vector dV = (-spec.G_node.cwiseProduct(V) - Bi * f + injection).cwiseQuotient(spec.C_cap);
        const Vector df = (Bi.transpose() * V - spec.R_line.cwiseProduct(f)).cwiseQuotient(spec.L_ind);
        V += spec.epsilon * dV;
        f += spec.epsilon * df;
    }
    return V + spec.d_meas;
}

}  // namespace

TEST_CASE("default topology") {
    const GridSpec spec = default_topology();
    CHECK(spec.n_nodes == 8);
    CHECK(spec.n_edges() == 9);
    CHECK_NOTHROW(spec.validate());
    const auto deg = node_degrees(spec);
    CHECK(deg[3] == 4);  // lines to 1, 2, 3 and 5
    CHECK(deg[4] == 4);
    CHECK(spec.R_line.isApprox(Vector::Constant(9, 10.0)));
    CHECK(spec.epsilon == 0.1);
}

TEST_CASE("incidence matrix") {
    const GridSpec spec = default_topology();
    const Matrix B = incidence_matrix(spec);
    CHECK(B.rows() == 8);
    CHECK(B.cols() == 9);
    CHECK(B.colwise().sum().isZero());
    for (int j = 0; j < spec.n_edges(); ++j) {
        CHECK((B.col(j).array() == 1.0).count() == 1);
        CHECK((B.col(j).array() == -1.0).count() == 1);
        const auto [a, b] = spec.edges[static_cast<size_t>(j)];
        if (std::min(a, b) == 4 && std::max(a, b) == 5) {
            CHECK(B(3, j) == 1.0);
            CHECK(B(4, j) == -1.0);
        }
    }
}

TEST_CASE("spec validation") {
    GridSpec s = default_topology();
    s.edges.pop_back();
    s.edges.pop_back();
    s.edges.erase(s.edges.begin() + 6);  // drop the tie line (4,5)
    s.L_ind = Vector::Ones(s.n_edges());
    s.R_line = Vector::Constant(s.n_edges(), 10.0);
    CHECK_THROWS_AS(s.validate(), ParseError);

    GridSpec neg = default_topology();
    neg.G_node(2) = -1.0;
    CHECK_THROWS_AS(neg.validate(), ParseError);

    GridSpec dup = default_topology();
    dup.edges[8] = {4, 1};
    CHECK_THROWS_AS(dup.validate(), ParseError);

    GridSpec range = default_topology();
    range.edges[0] = {0, 4};
    CHECK_THROWS_AS(range.validate(), ParseError);
}

TEST_CASE("default discretization is Schur stable") {
    const GridModel gm = assemble_plant(default_topology());
    CHECK(gm.plant.spectral_radius() < 1.0);
    CHECK(gm.plant.n_states() == 17);
    CHECK(gm.plant.n_agents() == 8);
}

TEST_CASE("sensitivity matches the voltage Schur complement and is symmetric") {
    for (double g : {1.0, 2.0, 5.0}) {
        const GridSpec spec = with_conductance(default_topology(), g);
        const GridModel gm = assemble_plant(spec);
        const Matrix Bi = incidence_matrix(spec);
        const Matrix schur = Matrix(spec.G_node.asDiagonal()) +
                             Bi * spec.R_line.cwiseInverse().asDiagonal() * Bi.transpose();
        const Matrix oracle = schur.inverse();
        CHECK((gm.model.H - oracle).norm() < 1e-8);
        CHECK((gm.model.H - gm.model.H.transpose()).norm() < 1e-8);
        CHECK((continuous_sensitivity(spec) - gm.model.H).norm() < 1e-10);
    }
}

TEST_CASE("unstable discretization is reported") {
    const GridSpec spec = with_conductance(default_topology(), 50.0);
    CHECK_THROWS_AS(assemble_plant(spec), UnstableDiscretization);
    try {
        assemble_plant(spec);
    } catch (const UnstableDiscretization& e) {
        CHECK(e.spectral_radius() >= 1.0);
    }
    CHECK(continuous_sensitivity(spec).allFinite());
}

TEST_CASE("reference output with matched injections") {
    GridSpec spec = default_topology();
    spec.delta_I = Vector::Zero(8);
    const GridModel gm = assemble_plant(spec);
    CHECK((gm.disturbance - gm.y_ref).norm() < 1e-12);
    CHECK((physical_voltage(spec, Vector::Zero(8), 20'000) - gm.y_ref).norm() < 1e-8);

    GridSpec same = default_topology();
    same.delta_I = same.I_star;
    same.d_meas = Vector::LinSpaced(8, -0.1, 0.1);
    const GridModel g2 = assemble_plant(same);
    CHECK((g2.disturbance - same.d_meas).norm() < 1e-12);
    CHECK((g2.y_ref - (g2.model.H * same.I_star + same.d_meas)).norm() < 1e-12);
}

TEST_CASE("deviation plant reproduces the physical grid") {
    const GridSpec spec = default_topology();
    const GridModel gm = assemble_plant(spec);
    const Vector I_c = Vector::LinSpaced(8, -0.5, 0.5);
    const Vector physical = physical_voltage(spec, I_c, 20'000);
    CHECK((physical - (gm.model.H * I_c + gm.disturbance)).norm() < 1e-8);

    Vector x = Vector::Zero(gm.plant.n_states());
    Vector y;
    for (int k = 0; k < 20'000; ++k) {
        auto s = step(gm.plant, x, I_c);
        x = s.x_next;
        y = s.y;
    }
    CHECK((y - physical).norm() < 1e-8);
}

TEST_CASE("LTI and algebraic decentralized limits agree on the grid") {
    const GridSpec spec = default_topology();
    const GridModel gm = assemble_plant(spec);
    const auto obj = tracking_objective(spec, gm.y_ref);
    const ControllerConfig cfg{Mode::Decentralized, 0.05};
    const Vector zero = Vector::Zero(8);
    const auto alg = run_algebraic(gm.model, obj, gm.disturbance, cfg, zero, {100'000, 1e-12});
    const auto lti = run_lti(gm.plant, obj, cfg, Vector::Zero(17), zero, {100'000, 1e-12});
    CHECK((alg.u.back() - lti.u.back()).norm() < 1e-6);
}

TEST_CASE("conductance sweep trends") {
    const std::vector<double> gs{1, 2, 5, 10, 20, 50, 100};
    const auto rows = sweep_g(default_topology(), gs, 0.05, 100'000, true);
    REQUIRE(rows.size() == gs.size());
    int non_monotone = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        CHECK(r.g == gs[i]);
        CHECK(r.condition_satisfied);
        CHECK(r.true_rel_suboptimality > 0.0);
        CHECK(std::abs(r.sim_rel_suboptimality - r.true_rel_suboptimality) < 1e-6);
        if (r.tight_applicable) CHECK(r.tight_bound_rel >= r.true_rel_suboptimality);
        if (i > 0) {
            if (r.true_rel_suboptimality > rows[i - 1].true_rel_suboptimality) ++non_monotone;
            CHECK(r.condition_rhs - r.condition_lhs >= rows[i - 1].condition_rhs - rows[i - 1].condition_lhs);
        }
    }
    CHECK(non_monotone <= 1);
    CHECK(rows.back().true_rel_suboptimality < rows.front().true_rel_suboptimality);

    CHECK(rows.front().xi_lambda_max.has_value());
    CHECK(*rows.front().xi_lambda_max < 1.0);
    CHECK_FALSE(rows[4].xi_lambda_max.has_value());
    CHECK_FALSE(rows[4].notes.empty());

    const auto serial = sweep_g(default_topology(), gs, 0.05, 100'000, false);
    CHECK(sweep_csv(serial) == sweep_csv(rows));
    const std::string csv = sweep_csv(rows);
    CHECK(csv.rfind("G,coupling_condition,lhs,rhs,true_rel,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);
}
