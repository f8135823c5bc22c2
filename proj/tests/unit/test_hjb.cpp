#include <doctest.h>

#include "rtsmp/errors.hpp"
#include "rtsmp/hjb.hpp"
#include "rtsmp/nonlocal.hpp"
#include "support.hpp"

#include <cmath>

using namespace rtsmp;
using namespace rtsmp::test;

namespace {

constexpr double kPi = 3.14159265358979323846;

SolverConfig config_of(const Scenario& s, double tol = 1e-10) {
    SolverConfig c = s.solver;
    c.tolerance = tol;
    return c;
}

GridFunction x_field(const std::shared_ptr<const PhaseGrid>& g, double (*f)(double)) {
    GridFunction u(g);
    for (Index ix = 0; ix < g->x_count(); ++ix)
        for (Index iv = 0; iv < g->v_count(); ++iv) u(ix, iv) = f(g->x_point(ix)[0]);
    return u;
}

/// Small scenarios covering jump atoms, continuous measures, controls and a ball domain.
std::vector<Scenario> property_scenarios() {
    std::vector<Scenario> out;
    out.push_back(example("2.1", {{"domain_x", "resolution", "24"}, {"equation", "lambda", "1"}}));
    out.push_back(example("1.1", {{"domain_x", "resolution", "24"}, {"equation", "lambda", "0.5"}}));
    out.push_back(example("2.2", {{"domain_x", "resolution", "10"}, {"equation", "lambda", "1"}}));
    out.push_back(example("2.3", {{"domain_x", "resolution", "12"},
                                  {"measure", "nodes", "16"},
                                  {"drift", "control_count", "8"},
                                  {"equation", "lambda", "2"}}));
    out.push_back(example("2.5", {{"domain_x", "resolution", "24"},
                                  {"measure", "nodes", "8"},
                                  {"equation", "lambda", "1"}}));
    return out;
}

}  // namespace

TEST_CASE("hamiltonian examples") {
    const DriftField vel = DriftField::velocity(2);
    Vector x = Vector::Zero(2), v(2), p(2);
    v << 0.3, -1.2;
    p << 2.0, 0.5;
    CHECK(hamiltonian(x, v, p, vel, OptimizationMode::sup) == doctest::Approx(-v.dot(p)));
    CHECK(hamiltonian(x, v, p, vel, OptimizationMode::inf) == doctest::Approx(-v.dot(p)));
    CHECK(hamiltonian(x, v, Vector::Zero(2), vel, OptimizationMode::sup) == 0.0);

    for (Index k : {8, 16, 64}) {
        const DriftField ctl = DriftField::control(2).with_sphere_controls(k);
        Gen gen(k);
        for (int t = 0; t < 50; ++t) {
            const Vector q = gen.vector(2, -3, 3);
            const double sup = hamiltonian(x, v, q, ctl, OptimizationMode::sup);
            const double inf = hamiltonian(x, v, q, ctl, OptimizationMode::inf);
            CHECK(sup <= q.norm() + 1e-12);
            CHECK(q.norm() - sup <= (1.0 - std::cos(kPi / static_cast<double>(k))) * q.norm() + 1e-12);
            CHECK(inf >= -q.norm() - 1e-12);
            CHECK(inf + q.norm() <= (1.0 - std::cos(kPi / static_cast<double>(k))) * q.norm() + 1e-12);
        }
        CHECK(hamiltonian(x, v, Vector::Zero(2), ctl, OptimizationMode::sup) == 0.0);
    }
}

TEST_CASE("upwind gradient") {
    const Scenario s = example("2.1", {{"domain_x", "resolution", "9"}});
    const Vector fwd = Vector::Constant(1, 1.0), bwd = Vector::Constant(1, -1.0);
    const GridFunction lin = x_field(s.grid, [](double x) { return 3.0 * x - 1.0; });
    for (Index ix = 1; ix + 1 < lin.x_count(); ++ix) {
        CHECK(upwind_gradient(lin, ix, 0, fwd)[0] == doctest::Approx(3.0));
        CHECK(upwind_gradient(lin, ix, 1, bwd)[0] == doctest::Approx(3.0));
    }
    const GridFunction kink = x_field(s.grid, [](double x) { return std::abs(x); });
    const Index centre = 4;
    REQUIRE(s.grid->x_point(centre)[0] == 0.0);
    CHECK(upwind_gradient(kink, centre, 0, fwd)[0] == doctest::Approx(1.0));
    CHECK(upwind_gradient(kink, centre, 0, bwd)[0] == doctest::Approx(-1.0));
    CHECK(upwind_gradient(kink, centre, 0, Vector::Zero(1))[0] == doctest::Approx(1.0));
    const GridFunction c(s.grid, 4.0);
    CHECK(upwind_gradient(c, 3, 0, fwd)[0] == 0.0);
    CHECK_THROWS_AS(upwind_gradient(c, 8, 0, fwd), GridError);
    CHECK_THROWS_AS(upwind_gradient(c, 0, 0, bwd), GridError);

    const Scenario t = example("2.6", {{"domain_x", "resolution", "8"}, {"measure", "nodes", "4"}});
    GridFunction plane(t.grid);
    for (Index ix = 0; ix < plane.x_count(); ++ix) plane(ix, 0) = t.grid->x_point(ix)[1];
    // x_1 wraps from 7/8 back to 0
    const Index last = t.x_domain.ravel((IndexVector(2) << 3, 7).finished());
    CHECK(upwind_gradient(plane, last, 0, (Vector(2) << 0.0, 1.0).finished())[1] == doctest::Approx(-7.0));
}

TEST_CASE("constants and zeros are exact fixed points") {
    for (const Scenario& base : property_scenarios()) {
        for (double c : {0.0, 1.5, -2.0}) {
            const Scenario s = build_scenario(with(to_config(base), {{"equation", "g", format_real(base.lambda * c)},
                                                                    {"equation", "psi", format_real(c)}}));
            const SolveResult up = solve_stationary(s, config_of(s));
            CHECK((up.solution.values().array() - c).abs().maxCoeff() <= 1e-8);
            if (c == 0.0) CHECK(up.solution.values().cwiseAbs().maxCoeff() == 0.0);
            const SolveResult sl = semi_lagrangian_value(s, config_of(s));
            CHECK((sl.solution.values().array() - c).abs().maxCoeff() <= 1e-8);
            const GridFunction r = residual(GridFunction(s.grid, c), s);
            CHECK(r.values().cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("torus constant with a source") {
    const Scenario s = example("1.1", {{"domain_x", "resolution", "32"},
                                       {"equation", "lambda", "2"},
                                       {"equation", "g", "const:3"}});
    const SolveResult r = solve_stationary(s, config_of(s));
    CHECK((r.solution.values().array() - 1.5).abs().maxCoeff() <= 1e-8);
    CHECK(r.update_norm <= 1e-10);
}

TEST_CASE("upwind solver against the semi-Lagrangian oracle") {
    const Scenario s = example("1.1", {{"equation", "lambda", "1"}, {"equation", "g", "sin(2*pi*x)"}});
    REQUIRE(s.grid->x_count() == 128);
    REQUIRE(s.grid->v_count() == 2);
    const SolveResult up = solve_stationary(s, config_of(s));
    const SolveResult sl = semi_lagrangian_value(s, config_of(s));
    CHECK(sup_diff(up.solution, sl.solution) <= 0.05);
    CHECK(up.residual_norm <= 1e-9);

    const Scenario s21 = example("2.1", {{"equation", "lambda", "1"}, {"equation", "g", "cos(pi*x)"}});
    const double gap = sup_diff(solve_stationary(s21, config_of(s21)).solution,
                                semi_lagrangian_value(s21, config_of(s21)).solution);
    CHECK(gap <= 0.05);
}

TEST_CASE("semi-Lagrangian barrier computation") {
    const Scenario s = example("2.1", {{"domain_x", "resolution", "32"},
                                       {"equation", "lambda", "0.7"},
                                       {"equation", "g", format_real(0.7 * 2.5)},
                                       {"equation", "psi", "const:2.5"}});
    const SolveResult r = semi_lagrangian_value(s, config_of(s));
    CHECK((r.solution.values().array() - 2.5).abs().maxCoeff() <= 1e-8);
    SolverConfig bad = config_of(s);
    bad.time_step = 10.0 * s.x_domain.min_spacing();
    CHECK_THROWS_AS(semi_lagrangian_value(s, bad), PreconditionError);
}

TEST_CASE("solver preconditions and non-convergence") {
    const Scenario zero_lambda = example("2.1", {{"domain_x", "resolution", "16"}});
    CHECK_THROWS_AS(solve_stationary(zero_lambda, config_of(zero_lambda)), PreconditionError);
    const Scenario gamma = example("2.1", {{"domain_x", "resolution", "16"},
                                           {"equation", "lambda", "1"},
                                           {"equation", "gamma", "0.5"}});
    CHECK_THROWS_AS(solve_stationary(gamma, config_of(gamma)), PreconditionError);
    const Scenario s = example("2.1", {{"domain_x", "resolution", "64"},
                                       {"equation", "lambda", "0.01"},
                                       {"equation", "g", "cos(pi*x)"}});
    SolverConfig c = config_of(s);
    c.max_iterations = 3;
    try {
        solve_stationary(s, c);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.iterations() == 3);
        CHECK(e.last_update() > 0.0);
    }
}

TEST_CASE("jacobi and gauss-seidel reach the same fixed point") {
    const Scenario s = example("2.2", {{"domain_x", "resolution", "16"},
                                       {"equation", "lambda", "1"},
                                       {"equation", "g", "sin(3*x0)*cos(2*x1)"}});
    SolverConfig gs = config_of(s);
    SolverConfig jac = gs;
    jac.sweep = SweepOrder::jacobi;
    SolverConfig jac4 = jac;
    jac4.threads = 4;
    const GridFunction a = solve_stationary(s, gs).solution;
    const GridFunction b = solve_stationary(s, jac).solution;
    const GridFunction c = solve_stationary(s, jac4).solution;
    CHECK(sup_diff(a, b) <= 1e-9);
    CHECK(b.values() == c.values());
}

TEST_CASE("comparison check examples") {
    const Scenario s = example("2.1", {{"domain_x", "resolution", "32"},
                                       {"equation", "lambda", "1"},
                                       {"equation", "g", "cos(pi*x)"}});
    const GridFunction w = solve_stationary(s, config_of(s)).solution;
    const ComparisonReport same = comparison_check(w, w, s, 0.0);
    CHECK(same.holds());
    CHECK(same.max_excess == 0.0);

    const GridFunction g1 = grid_sample(FieldSpec::parse("cos(pi*x)"), s.grid);
    const GridFunction g2 = grid_sample(FieldSpec::parse("cos(pi*x) + 0.5*(1 + x)"), s.grid);
    const GridFunction psi(s.grid, 0.0);
    const GridFunction u1 = solve_stationary(s, g1, psi, config_of(s)).solution;
    const GridFunction u2 = solve_stationary(s, g2, psi, config_of(s)).solution;
    CHECK(comparison_check(u1, u2, s, 1e-10).holds());

    GridFunction lowered = w;
    for (Index ix = 0; ix < w.x_count(); ++ix)
        if (!is_dirichlet(s.x_domain, ix)) lowered.values().row(ix).array() -= 0.1;
    const ComparisonReport bad = comparison_check(w, lowered, s, 1e-10);
    CHECK_FALSE(bad.holds());
    CHECK(bad.boundary_ordered);
    CHECK(bad.violations.size() == static_cast<std::size_t>((w.x_count() - 2) * w.v_count()));
    CHECK(bad.max_excess == doctest::Approx(0.1));

    GridFunction boundary = w;
    boundary(0, 0) -= 1.0;
    const ComparisonReport edge = comparison_check(w, boundary, s, 1e-10);
    CHECK_FALSE(edge.boundary_ordered);
    CHECK(edge.boundary_violations.size() == 1);

    const Scenario other = example("2.1", {{"domain_x", "resolution", "16"}});
    CHECK_THROWS_AS(comparison_check(w, GridFunction(other.grid), s, 0.0), GridError);
}

TEST_CASE("residual examples") {
    const Scenario s = example("2.1", {{"domain_x", "resolution", "48"},
                                       {"equation", "lambda", "1"},
                                       {"equation", "g", "cos(pi*x)"}});
    const SolveResult r = solve_stationary(s, config_of(s, 1e-9));
    CHECK(residual(r.solution, s).values().cwiseAbs().maxCoeff() <= 1e-8);

    const Scenario s25 = example("2.5");
    const GridFunction u = grid_sample(FieldSpec::parse(find_example("2.5").default_field), s25.grid);
    const GridFunction res = residual(u, s25);
    for (Index ix = 0; ix < u.x_count(); ++ix) {
        if (is_dirichlet(s25.x_domain, ix)) continue;
        for (Index iv = 0; iv < u.v_count(); ++iv) CHECK(res(ix, iv) <= 1e-12);
    }

    const Scenario degenerate = example("2.1", {{"domain_x", "resolution", "8"}, {"equation", "gamma", "-1"}});
    CHECK_THROWS_AS(residual(GridFunction(degenerate.grid, 0.0), degenerate), RhoDegenerateError);
}

TEST_CASE("property: monotonicity of the scheme") {
    Gen gen(2024);
    for (const Scenario& s : property_scenarios()) {
        for (int t = 0; t < 4; ++t) {
            const GridFunction g1 = gen.smooth_field(s.grid, 3, 2.0);
            GridFunction g2 = g1;
            g2.values() += gen.noise(s.grid, 0.0, 0.5).values();
            const GridFunction psi1 = gen.smooth_field(s.grid, 2, 1.0);
            GridFunction psi2 = psi1;
            psi2.values() += gen.noise(s.grid, 0.0, 0.3).values();
            const GridFunction u1 = solve_stationary(s, g1, psi1, config_of(s)).solution;
            const GridFunction u2 = solve_stationary(s, g2, psi2, config_of(s)).solution;
            CHECK((u1.values() - u2.values()).maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("property: uniqueness from both barriers") {
    Gen gen(77);
    for (const Scenario& s : property_scenarios()) {
        const GridFunction g = gen.smooth_field(s.grid, 3, 1.5);
        const GridFunction psi = gen.smooth_field(s.grid, 2, 1.0);
        const SolverConfig c = config_of(s, 1e-9);
        const GridFunction lo = solve_stationary(s, g, psi, c, InitialGuess::lower_barrier).solution;
        const GridFunction hi = solve_stationary(s, g, psi, c, InitialGuess::upper_barrier).solution;
        const GridFunction zero = solve_stationary(s, g, psi, c, InitialGuess::zero).solution;
        CHECK(sup_diff(lo, hi) <= 10 * c.tolerance);
        CHECK(sup_diff(lo, zero) <= 10 * c.tolerance);
    }
}

TEST_CASE("property: update norms do not increase") {
    Gen gen(5);
    for (const Scenario& s : property_scenarios()) {
        const GridFunction g = gen.smooth_field(s.grid, 3, 1.0);
        const GridFunction psi = gen.smooth_field(s.grid, 2, 1.0);
        for (SweepOrder order : {SweepOrder::gauss_seidel, SweepOrder::jacobi}) {
            SolverConfig c = config_of(s);
            c.sweep = order;
            const SolveResult r = solve_stationary(s, g, psi, c, InitialGuess::upper_barrier);
            REQUIRE(r.updates.size() >= 2);
            for (std::size_t i = 2; i < r.updates.size(); ++i) CHECK(r.updates[i] <= r.updates[i - 1] * (1 + 1e-9) + 1e-15);
        }
    }
}

TEST_CASE("property: Perron bracket bounds the solution") {
    Gen gen(9);
    for (const Scenario& s : property_scenarios()) {
        for (int t = 0; t < 3; ++t) {
            const GridFunction g = gen.noise(s.grid, -2.0, 2.0);
            const GridFunction psi = gen.noise(s.grid, -1.0, 1.0);
            const double m = barrier_bound(g, psi, s.lambda);
            CHECK(m == doctest::Approx(std::max(g.values().cwiseAbs().maxCoeff() / s.lambda,
                                                psi.values().cwiseAbs().maxCoeff())));
            const GridFunction u = solve_stationary(s, g, psi, config_of(s)).solution;
            CHECK(u.values().cwiseAbs().maxCoeff() <= m + 1e-9);
            const GridFunction w = semi_lagrangian_value(s, g, psi, config_of(s)).solution;
            CHECK(w.values().cwiseAbs().maxCoeff() <= m + 1e-9);
        }
    }
}
