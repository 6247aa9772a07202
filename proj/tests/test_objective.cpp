#include <doctest.h>

#include "ofo/errors.hpp"
#include "ofo/objective.hpp"
#include "test_support.hpp"

#include <numeric>
#include <random>

using namespace ofo;
using testing::central_difference;

TEST_CASE("quadratic gradients") {
    const auto obj = make_quadratic_objective(1.0, 1.0, Vector::Zero(2));
    CHECK(obj.grad_u(Vector::Zero(2)).isZero());

    const auto obj2 = make_quadratic_objective(2.0, 1.0, Vector::Zero(2));
    Vector u(2);
    u << 1.0, -1.0;
    const Vector g = obj2.grad_u(u);
    CHECK(g(0) == doctest::Approx(2.0));
    CHECK(g(1) == doctest::Approx(-2.0));

    Vector y_ref(2);
    y_ref << 0.3, -0.2;
    const auto tracking = make_quadratic_objective(1.0, 3.0, y_ref);
    CHECK(tracking.grad_y(y_ref).isZero());

    Vector y(2);
    y << 0.375, 0.5;
    CHECK(obj.grad_y(y) == y);
}

TEST_CASE("quadratic gradients are exact") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    Vector y_ref(4), u(4), y(4);
    for (int i = 0; i < 4; ++i) {
        y_ref(i) = normal(rng);
        u(i) = normal(rng);
        y(i) = normal(rng);
    }
    const auto obj = make_quadratic_objective(1.7, 0.6, y_ref);
    CHECK(obj.grad_u(u) == 1.7 * u);
    CHECK(obj.grad_y(y) == 0.6 * (y - y_ref));
    const auto& b = obj.bounds();
    CHECK(b.L_u == 1.7);
    CHECK(b.m_u == 1.7);
    CHECK(b.L_y == 0.6);
    CHECK(b.m_y == 0.6);
}

TEST_CASE("objective value") {
    Vector y_ref(2);
    y_ref << 1.0, 2.0;
    CHECK(make_quadratic_objective(1, 1, y_ref).value(Vector::Zero(2), y_ref) == 0.0);
    CHECK(testing::unit_quadratic(2).value(Vector::Ones(2), Vector::Ones(2)) == doctest::Approx(2.0));
}

TEST_CASE("value is invariant under a joint agent permutation") {
    CurvatureBounds b{3.0, 1.0, 2.0, 0.5};
    Vector shift(3), ref(3), u(3), y(3);
    shift << 0.1, -0.4, 2.0;
    ref << 1.0, 0.0, -1.0;
    u << 0.3, -1.1, 0.8;
    y << 2.0, 0.5, -0.25;
    const auto obj = make_log_cosh_objective(b, shift, ref);
    const std::vector<int> perm{2, 0, 1};
    Vector ps(3), pr(3), pu(3), py(3);
    for (int i = 0; i < 3; ++i) {
        ps(i) = shift(perm[i]);
        pr(i) = ref(perm[i]);
        pu(i) = u(perm[i]);
        py(i) = y(perm[i]);
    }
    const auto permuted = make_log_cosh_objective(b, ps, pr);
    CHECK(permuted.value(pu, py) == doctest::Approx(obj.value(u, y)).epsilon(1e-14));
}

TEST_CASE("gradients match central finite differences") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> point(-3.0, 3.0);
    CurvatureBounds b{4.0, 0.5, 2.5, 1.0};
    Vector shift(3), ref(3);
    shift << 0.2, -1.0, 0.7;
    ref << -0.5, 0.3, 1.1;
    const auto log_cosh = make_log_cosh_objective(b, shift, ref);
    const auto quad = make_quadratic_objective(1.3, 0.8, ref);

    for (const SeparableObjective* obj : {&log_cosh, &quad}) {
        for (int trial = 0; trial < 100; ++trial) {
            Vector u(3), y(3);
            for (int i = 0; i < 3; ++i) {
                u(i) = point(rng);
                y(i) = point(rng);
            }
            const Vector gu = obj->grad_u(u);
            const Vector gy = obj->grad_y(y);
            for (int i = 0; i < 3; ++i) {
                auto fu = [&](double t) {
                    Vector v = u;
                    v(i) = t;
                    return obj->value(v, y);
                };
                auto fy = [&](double t) {
                    Vector v = y;
                    v(i) = t;
                    return obj->value(u, v);
                };
                const double du = central_difference(fu, u(i));
                const double dy = central_difference(fy, y(i));
                CHECK(std::abs(gu(i) - du) <= 1e-6 * std::max(1.0, std::abs(du)));
                CHECK(std::abs(gy(i) - dy) <= 1e-6 * std::max(1.0, std::abs(dy)));
            }
        }
    }
}

TEST_CASE("declared curvature bounds hold on samples") {
    CurvatureBounds b{4.0, 0.5, 2.5, 1.0};
    const auto obj = make_log_cosh_objective(b, Vector::Zero(3), Vector::Ones(3));
    const auto check = check_curvature(obj, 1000, 5.0, 99);
    CHECK(check.min_convexity_margin_u >= -1e-10);
    CHECK(check.min_convexity_margin_y >= -1e-10);
    CHECK(check.min_smoothness_margin_u >= -1e-10);
    CHECK(check.min_smoothness_margin_y >= -1e-10);

    // the same costs with an overstated modulus are caught
    CurvatureBounds wrong = b;
    wrong.m_u = 3.0;
    const auto overstated = make_log_cosh_objective(wrong, Vector::Zero(3), Vector::Ones(3));
    std::vector<ScalarCost> in, out;
    for (int i = 0; i < 3; ++i) {
        in.push_back(obj.input_cost(i));
        out.push_back(obj.output_cost(i));
    }
    const SeparableObjective mislabeled(in, out, wrong);
    CHECK(check_curvature(mislabeled, 1000, 5.0, 99).min_convexity_margin_u < 0.0);
    (void)overstated;
}

TEST_CASE("invalid objectives") {
    CHECK_THROWS(make_quadratic_objective(0.0, 1.0, Vector::Zero(2)));
    CHECK_THROWS(make_quadratic_objective(1.0, -1.0, Vector::Zero(2)));
    CHECK_THROWS_AS(make_quadratic_objective(1.0, 1.0, Vector{}), DimensionMismatch);
    const auto obj = testing::unit_quadratic(2);
    CHECK_THROWS_AS(obj.grad_u(Vector::Zero(3)), DimensionMismatch);
    CHECK_THROWS_AS(obj.grad_y(Vector::Zero(1)), DimensionMismatch);
    CHECK_THROWS_AS(obj.value(Vector::Zero(2), Vector::Zero(3)), DimensionMismatch);
    CHECK_THROWS(SeparableObjective({}, {}, {}));
    CHECK_THROWS(make_log_cosh_objective({1.0, 2.0, 1.0, 1.0}, Vector::Zero(2), Vector::Zero(2)));
}
