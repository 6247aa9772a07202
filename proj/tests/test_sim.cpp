#include <doctest.h>

#include "ofo/analysis.hpp"
#include "ofo/equilibria.hpp"
#include "ofo/errors.hpp"
#include "ofo/sim.hpp"
#include "test_support.hpp"

#include <random>

using namespace ofo;

namespace {

SensitivityModel reference_model() { return SensitivityModel::from_map(testing::reference_H()); }

LtiPlant scalar_plant() {
    return LtiPlant(Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 1.0),
                    Matrix::Constant(1, 1, 0.0), Vector::Zero(1));
}

/// LTI plant realizing the reference H: A = 0.5 I, B = 0.5 H, C = I.
LtiPlant reference_plant() {
    return LtiPlant(0.5 * Matrix::Identity(2, 2), 0.5 * testing::reference_H(), Matrix::Identity(2, 2),
                    Matrix::Zero(2, 2), testing::reference_d());
}

}  // namespace

TEST_CASE("optimum is a fixed point of the centralized loop") {
    const auto obj = testing::unit_quadratic(2);
    const Vector u_star = testing::reference_u_star();
    const auto traj = run_algebraic(reference_model(), obj, testing::reference_d(),
                                    {Mode::Centralized, 0.1}, u_star, {100, 1e-12});
    for (const Vector& u : traj.u) CHECK((u - u_star).norm() < 1e-14);
    CHECK(traj.info.converged);
    const auto m = metrics(traj, u_star, reference_model());
    for (double e : m.rel_err_u) CHECK(e < 1e-14);
    CHECK_FALSE(m.combined_sq.has_value());
}

TEST_CASE("algebraic loops converge to their equilibria") {
    const auto obj = testing::unit_quadratic(2);
    const auto model = reference_model();
    const Vector d = testing::reference_d();
    const auto dec = run_algebraic(model, obj, d, {Mode::Decentralized, 0.1}, Vector::Zero(2), {10'000, 1e-12});
    CHECK((dec.u.back() - testing::reference_u_inf()).norm() < 1e-8);
    const auto cen = run_algebraic(model, obj, d, {Mode::Centralized, 0.1}, Vector::Zero(2), {10'000, 1e-12});
    CHECK((cen.u.back() - testing::reference_u_star()).norm() < 1e-8);

    CHECK(dec.info.plant == PlantKind::Algebraic);
    CHECK(dec.info.mode == Mode::Decentralized);
    CHECK(dec.info.eta == 0.1);
    CHECK(dec.size() == dec.info.iterations + 1);
    CHECK(dec.y.size() == dec.u.size());
    CHECK(dec.x.empty());
    for (std::size_t k = 0; k < dec.size(); ++k) CHECK((dec.y[k] - (model.H * dec.u[k] + d)).norm() < 1e-14);
}

TEST_CASE("relative error becomes monotone once small") {
    const auto obj = testing::unit_quadratic(2);
    const auto model = reference_model();
    const auto traj = run_algebraic(model, obj, testing::reference_d(), {Mode::Decentralized, 0.1},
                                    Vector::Zero(2), {10'000, 1e-12});
    const auto m = metrics(traj, testing::reference_u_inf(), model);
    bool below = false;
    for (std::size_t k = 0; k + 1 < m.rel_err_u.size(); ++k) {
        if (m.rel_err_u[k] < 1e-6) below = true;
        if (below && m.rel_err_u[k] > 1e-13) CHECK(m.rel_err_u[k + 1] <= m.rel_err_u[k]);
    }
    CHECK(below);
}

TEST_CASE("zero reference falls back to absolute errors") {
    const auto traj = run_algebraic(reference_model(), testing::unit_quadratic(2), Vector::Zero(2),
                                    {Mode::Centralized, 0.1}, Vector::Ones(2), {5, 0.0});
    const auto m = metrics(traj, Vector::Zero(2), reference_model());
    CHECK(m.absolute);
    CHECK(m.rel_err_u.front() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("centralized descent decreases the reduced objective") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        auto inst = testing::random_weakly_coupled(rng);
        const auto obj = inst.objective();
        const auto k = monotonicity_constants(obj, inst.model, Convention::Tight);
        const double eta = 1.0 / k.L;
        std::normal_distribution<double> normal;
        Vector u0(inst.model.n_agents());
        for (Eigen::Index i = 0; i < u0.size(); ++i) u0(i) = 3.0 * normal(rng);
        const auto traj = run_algebraic(inst.model, obj, inst.d, {Mode::Centralized, eta}, u0, {2000, 1e-12});
        for (std::size_t j = 0; j + 1 < traj.size(); ++j)
            CHECK(obj.value(traj.u[j + 1], traj.y[j + 1]) <= obj.value(traj.u[j], traj.y[j]) + 1e-12);
    }
}

TEST_CASE("divergence raises NonFinite with the finite prefix") {
    const auto obj = testing::unit_quadratic(2);
    try {
        run_algebraic(reference_model(), obj, testing::reference_d(), {Mode::Decentralized, 10.0},
                      Vector::Zero(2), {100'000, 1e-12});
        FAIL("expected divergence");
    } catch (const NonFinite& e) {
        CHECK(e.step() > 0);
        CHECK(e.partial().size() == e.step());
        for (const Vector& u : e.partial().u) CHECK(u.allFinite());
    }
}

TEST_CASE("invalid run arguments") {
    const auto obj = testing::unit_quadratic(2);
    CHECK_THROWS_AS(run_algebraic(reference_model(), obj, testing::reference_d(), {Mode::Centralized, 0.1},
                                  Vector::Zero(3), {10, 1e-12}),
                    DimensionMismatch);
    CHECK_THROWS(run_algebraic(reference_model(), obj, testing::reference_d(), {Mode::Centralized, 0.0},
                               Vector::Zero(2), {10, 1e-12}));
    CHECK_THROWS(run_algebraic(reference_model(), obj, testing::reference_d(), {Mode::Centralized, 0.1},
                               Vector::Zero(2), {0, 1e-12}));
    CHECK_THROWS_AS(run_lti(reference_plant(), obj, {Mode::Centralized, 0.1}, Vector::Zero(1), Vector::Zero(2),
                            {10, 1e-12}),
                    DimensionMismatch);
}

TEST_CASE("LTI equilibrium is stationary") {
    const auto plant = reference_plant();
    const auto model = compute_sensitivity(plant);
    const auto obj = testing::unit_quadratic(2);
    const Vector u_inf = decentralized_fixed_point(obj, model, plant.d()).u;
    const Vector x0 = model.H_x * u_inf;
    const auto traj = run_lti(plant, obj, {Mode::Decentralized, 0.1}, x0, u_inf, {50, 0.0});
    CHECK(traj.size() == 51);
    CHECK(traj.x.size() == traj.u.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK((traj.u[k] - u_inf).norm() < 1e-14);
        CHECK((traj.x[k] - x0).norm() < 1e-14);
    }
    const auto m = metrics(traj, u_inf, model);
    REQUIRE(m.combined_sq.has_value());
    for (double v : *m.combined_sq) CHECK(v < 1e-26);
}

TEST_CASE("scalar LTI loop converges to zero") {
    const auto plant = scalar_plant();
    const auto traj = run_lti(plant, testing::unit_quadratic(1), {Mode::Decentralized, 0.01}, Vector::Zero(1),
                              Vector::Ones(1), {100'000, 1e-12});
    CHECK(traj.info.converged);
    CHECK(std::abs(traj.u.back()(0)) < 1e-9);
    CHECK(traj.info.plant == PlantKind::Lti);
}

TEST_CASE("LTI and algebraic limits agree") {
    const auto plant = reference_plant();
    const auto model = compute_sensitivity(plant);
    CHECK((model.H - testing::reference_H()).norm() < 1e-14);
    const auto obj = testing::unit_quadratic(2);
    for (Mode mode : {Mode::Centralized, Mode::Decentralized}) {
        const auto lti = run_lti(plant, obj, {mode, 0.05}, Vector::Zero(2), Vector::Zero(2), {100'000, 1e-12});
        const auto alg = run_algebraic(model, obj, plant.d(), {mode, 0.05}, Vector::Zero(2), {100'000, 1e-12});
        CHECK(lti.info.converged);
        CHECK((lti.u.back() - alg.u.back()).norm() < 1e-6);
    }
}

TEST_CASE("combined error contracts by the certified rate") {
    std::mt19937_64 rng(40);
    for (int trial = 0; trial < 5; ++trial) {
        const auto plant = testing::random_stable_plant(rng, 3);
        const auto model = compute_sensitivity(plant);
        const auto obj = make_quadratic_objective(2.0, 0.5, Vector::Zero(3));
        StepSizeCertificate s;
        try {
            s = eta_star(plant, obj, model, Convention::Tight);
        } catch (const NotCertifiable&) {
            continue;
        }
        const double eta = 0.9 * s.eta_star;
        const double lam = xi_matrix(plant, obj, model, eta, Convention::Tight).lambda_max;
        REQUIRE(lam < 1.0);
        const Vector u_inf = decentralized_fixed_point(obj, model, plant.d()).u;
        const auto traj = run_lti(plant, obj, {Mode::Decentralized, eta}, Vector::Ones(3), Vector::Zero(3), {300, 0.0});
        const auto combined = *metrics(traj, u_inf, model).combined_sq;
        for (std::size_t k = 0; k + 1 < combined.size(); ++k)
            CHECK(combined[k + 1] <= (lam + 1e-9) * combined[k] + 1e-28);
    }
}

TEST_CASE("LTI divergence raises NonFinite") {
    CHECK_THROWS_AS(run_lti(reference_plant(), testing::unit_quadratic(2), {Mode::Decentralized, 10.0},
                            Vector::Zero(2), Vector::Zero(2), {100'000, 1e-12}),
                    NonFinite);
}
