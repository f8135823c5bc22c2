#include <doctest.h>

#include "rtsmp/errors.hpp"
#include "rtsmp/expression.hpp"
#include "rtsmp/field.hpp"
#include "rtsmp/scenario.hpp"
#include "support.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace rtsmp;
using namespace rtsmp::test;

namespace {

Domain box1(double lo, double hi, Index n, bool periodic = false) {
    BoolArray p(1);
    p << periodic;
    IndexVector r(1);
    r << n;
    return Domain(Vector::Constant(1, lo), Vector::Constant(1, hi), p, r);
}

const char* kExample21 = R"(
[domain_x]
lower = (-1)
upper = (1)
resolution = 16
[domain_v]
lower = (-2)
upper = (2)
resolution = 8
[measure]
kind = atoms
atoms = (-1):0.5, (1):0.5
[drift]
kind = velocity
[equation]
lambda = 1
)";

}  // namespace

TEST_CASE("domain spacing, indexing and neighbors") {
    const Domain d = box1(-1.0, 1.0, 5);
    CHECK(d.spacing(0) == doctest::Approx(0.5));
    CHECK(d.point(0)[0] == -1.0);
    CHECK(d.point(4)[0] == 1.0);
    CHECK(d.neighbor(0, 0, -1) == -1);
    CHECK(d.neighbor(4, 0, 1) == -1);
    CHECK_FALSE(d.is_interior(0));
    CHECK(d.is_interior(2));

    const Domain t = box1(0.0, 1.0, 4, true);
    CHECK(t.spacing(0) == doctest::Approx(0.25));
    CHECK(t.neighbor(0, 0, -1) == 3);
    CHECK(t.neighbor(3, 0, 1) == 0);
    CHECK(t.is_interior(0));
    CHECK(t.wrap(Vector::Constant(1, 1.25))[0] == doctest::Approx(0.25));

    BoolArray p(2);
    p << false, false;
    IndexVector r(2);
    r << 3, 4;
    const Domain d2(Vector::Zero(2), Vector::Ones(2), p, r);
    CHECK(d2.node_count() == 12);
    for (Index i = 0; i < d2.node_count(); ++i) CHECK(d2.ravel(d2.unravel(i)) == i);
    CHECK(d2.stride(1) == 1);
    CHECK(d2.stride(0) == 4);
}

TEST_CASE("domain validation names the key") {
    BoolArray p(1);
    p << false;
    IndexVector r(1);
    r << 1;
    try {
        Domain(Vector::Constant(1, 0.0), Vector::Constant(1, 1.0), p, r, Shape::box, "domain_x");
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.key() == "domain_x.resolution");
    }
    r << 4;
    CHECK_THROWS_AS(Domain(Vector::Constant(1, 1.0), Vector::Constant(1, 0.0), p, r), ValidationError);
}

TEST_CASE("ball domain: active and interior nodes, exit time") {
    BoolArray p(2);
    p << false, false;
    IndexVector r(2);
    r << 21, 21;
    const Domain d(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0), p, r, Shape::ball);
    CHECK(d.is_active(d.nearest_node(Vector::Zero(2))));
    CHECK_FALSE(d.is_active(0));  // corner
    CHECK(d.exit_time(Vector::Zero(2), Vector::Unit(2, 0)) == doctest::Approx(1.0));
    CHECK(d.exit_time(Vector::Zero(2), 2.0 * Vector::Unit(2, 1)) == doctest::Approx(0.5));
}

TEST_CASE("expression parser") {
    const Expression e("sin(2*pi*x) + v1^2 - min(1, 1+x0)");
    CHECK(e.max_x_axis() == 0);
    CHECK(e.max_v_axis() == 1);
    Vector x(1), v(2);
    x << 0.25;
    v << 0.0, 3.0;
    CHECK(e(x, v) == doctest::Approx(1.0 + 9.0 - 1.0));
    CHECK(Expression("-2^2")(x, v) == doctest::Approx(-4.0));
    CHECK(Expression("2^3^2")(x, v) == doctest::Approx(512.0));
    CHECK_THROWS_AS(Expression("1 + "), ValidationError);
    CHECK_THROWS_AS(Expression("foo(1)"), ValidationError);
}

TEST_CASE("build_scenario on the interval example") {
    const Scenario s = scenario_from(kExample21);
    CHECK(s.measure.mass() == doctest::Approx(1.0));
    CHECK(s.grid->v_count() == 2);
    CHECK(s.grid->v_point(0)[0] == -1.0);
    CHECK(s.grid->v_point(1)[0] == 1.0);
    CHECK(s.grid->is_v0(0));
    CHECK(s.grid->is_v0(1));
    CHECK(s.v_layout == VelocityLayout::measure);
}

TEST_CASE("four axis atoms have unit mass") {
    const Scenario s = example("2.2");
    CHECK(s.measure.mass() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.measure.size() == 4);
}

TEST_CASE("validation errors name the offending key") {
    auto key_of = [](const std::string& text) -> std::string {
        try {
            scenario_from(text);
        } catch (const ValidationError& e) {
            return e.key();
        }
        return "<none>";
    };
    std::string neg = kExample21;
    neg.replace(neg.find("(1):0.5"), 7, "(1):-0.5");
    CHECK(key_of(neg) == "measure.atoms");

    std::string lam = kExample21;
    lam.replace(lam.find("lambda = 1"), 10, "lambda = -1");
    CHECK(key_of(lam) == "equation.lambda");

    std::string outside = kExample21;
    outside.replace(outside.find("(1):0.5"), 7, "(3):0.5");
    CHECK(key_of(outside) == "measure.atoms");

    std::string drift = kExample21;
    drift.replace(drift.find("kind = velocity"), 15, "kind = spiral");
    CHECK(key_of(drift) == "drift.kind");

    std::string g = kExample21 + std::string("g = sin(x1)\n");
    CHECK(key_of(g) == "equation.g");

    std::string levy = kExample21 + std::string("nonlocal = levy\n");
    levy.replace(levy.find("resolution = 8"), 14, "resolution = 8\nlayout = measure");
    CHECK(key_of(levy) == "domain_v.layout");

    CHECK_THROWS_AS(ScenarioConfig::parse("[nowhere]\n"), ValidationError);
    CHECK_THROWS_AS(ScenarioConfig::parse("[drift]\ncolour = red\n"), ValidationError);
}

TEST_CASE("scenario round trip is bit exact") {
    for (const auto& entry : example_registry()) {
        const Scenario a = entry.scenario();
        const ScenarioConfig c = to_config(a);
        const Scenario b = build_scenario(ScenarioConfig::parse(c.render()));
        CAPTURE(entry.name);
        CHECK(a.x_domain == b.x_domain);
        CHECK(a.v_domain == b.v_domain);
        CHECK(a.lambda == b.lambda);
        CHECK(a.gamma == b.gamma);
        CHECK(a.holder == b.holder);
        CHECK(a.measure.nodes() == b.measure.nodes());
        CHECK(a.measure.weights() == b.measure.weights());
        CHECK(a.measure.mass() == b.measure.mass());
        CHECK(a.drift.controls() == b.drift.controls());
        CHECK(a.drift.offset() == b.drift.offset());
        CHECK(a.g.text() == b.g.text());
        CHECK(a.psi.text() == b.psi.text());
        CHECK(a.solver.tolerance == b.solver.tolerance);
        CHECK(a.reach.horizon == b.reach.horizon);
        CHECK(to_config(b).render() == c.render());
    }

    Gen gen(11);
    for (int t = 0; t < 20; ++t) {
        ScenarioConfig c = ScenarioConfig::parse(kExample21);
        const double w = gen.uniform(0.01, 3.0);
        c.set("measure", "atoms", "(" + format_real(gen.uniform(-2, 2)) + "):" + format_real(w) + ", (" +
                                      format_real(gen.uniform(-2, 2)) + "):" + format_real(gen.uniform(0.01, 3.0)));
        c.set("equation", "lambda", format_real(gen.uniform(0.0, 5.0)));
        c.set("drift", "kind", "affine");
        c.set("drift", "matrix", "(" + format_real(gen.uniform(-2, 2)) + ")");
        c.set("drift", "vector", "(" + format_real(gen.uniform(-2, 2)) + ")");
        const Scenario a = build_scenario(c);
        const Scenario b = build_scenario(to_config(a));
        CHECK(a.measure.nodes() == b.measure.nodes());
        CHECK(a.measure.weights() == b.measure.weights());
        CHECK(a.lambda == b.lambda);
        CHECK(a.drift.matrix() == b.drift.matrix());
        CHECK(a.drift.offset() == b.drift.offset());
    }
}

TEST_CASE("built-in drifts satisfy their Lipschitz bound") {
    Gen gen(7);
    for (const auto& entry : example_registry()) {
        const Scenario s = entry.scenario();
        const DriftField& f = s.drift;
        const int nx = s.x_domain.dim();
        const int nv = s.v_domain.dim();
        for (int t = 0; t < 1000; ++t) {
            const Vector x1 = gen.vector(nx, -2, 2), x2 = gen.vector(nx, -2, 2);
            const Vector v1 = gen.vector(nv, -2, 2), v2 = gen.vector(nv, -2, 2);
            const Index k = gen.integer(0, f.term_count() - 1);
            const double lhs = (f.evaluate(x1, v1, k) - f.evaluate(x2, v2, k)).norm();
            CHECK(lhs <= f.lipschitz() * ((x1 - x2).norm() + (v1 - v2).norm()) + 1e-12);
        }
    }
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, -3, 0.5;
    const DriftField aff = DriftField::affine(a, Vector::Zero(2));
    for (int t = 0; t < 1000; ++t) {
        const Vector v1 = gen.vector(2, -2, 2), v2 = gen.vector(2, -2, 2);
        const Vector x = gen.vector(2, -1, 1);
        CHECK((aff.evaluate(x, v1, 0) - aff.evaluate(x, v2, 0)).norm() <= aff.lipschitz() * (v1 - v2).norm() + 1e-12);
    }
}

TEST_CASE("built-in measures: weights sum to the mass") {
    for (const auto& entry : example_registry()) {
        const Scenario s = entry.scenario();
        CAPTURE(entry.name);
        CHECK(std::abs(s.measure.weights().sum() - s.measure.mass()) <= 1e-12 * s.measure.mass());
        CHECK((s.measure.weights().array() > 0.0).all());
    }
    for (int dim = 1; dim <= 3; ++dim) {
        for (Index count : {8, 64, 200}) {
            const auto ball = VelocityMeasure::uniform_ball(Vector::Zero(dim), 1.0, 1.0, count);
            const auto sph = VelocityMeasure::uniform_sphere(Vector::Zero(dim), 1.0, 2.5, count);
            const auto box = VelocityMeasure::uniform_box(-Vector::Ones(dim), Vector::Ones(dim), 0.5, count);
            CHECK(std::abs(ball.weights().sum() - 1.0) <= 1e-12);
            CHECK(std::abs(sph.weights().sum() - 2.5) <= 1e-12 * 2.5);
            CHECK(std::abs(box.weights().sum() - 0.5) <= 1e-12 * 0.5);
        }
    }
}

TEST_CASE("sphere control set sizes") {
    CHECK(DriftField::control(1).with_sphere_controls().control_count() == 3);
    CHECK(DriftField::control(2).with_sphere_controls().control_count() == 17);
    CHECK(DriftField::control(3).with_sphere_controls().control_count() == 65);
    const DriftField f = DriftField::control(2).with_sphere_controls(16);
    for (Index k = 0; k < 16; ++k) CHECK(f.controls().col(k).norm() == doctest::Approx(1.0));
    CHECK(f.controls().col(16).norm() == 0.0);
}

TEST_CASE("grid_sample examples") {
    const Scenario s = scenario_from(kExample21);
    const GridFunction one = grid_sample(FieldSpec::parse("const:1"), s.grid);
    CHECK((one.values().array() == 1.0).all());

    const Scenario s25 = example("2.5");
    const GridFunction u = grid_sample(FieldSpec::parse("min(1, 1 + x)"), s25.grid);
    for (Index ix = 0; ix < u.x_count(); ++ix) {
        const double x = s25.grid->x_point(ix)[0];
        for (Index iv = 0; iv < u.v_count(); ++iv) CHECK(u(ix, iv) == (x >= 0 ? 1.0 : 1.0 + x));
    }

    const Scenario odd = example("2.5", {{"domain_x", "resolution", "129"}});
    try {
        grid_sample(FieldSpec::parse("1/x"), odd.grid);
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("x 64") != std::string::npos);
    }
}

TEST_CASE("field csv round trip") {
    const Scenario s = example("2.2", {{"domain_x", "resolution", "6"}});
    Gen gen(3);
    const GridFunction u = gen.smooth_field(s.grid);
    const auto path = std::filesystem::temp_directory_path() / "rtsmp_field_roundtrip.csv";
    write_field_csv(path.string(), u);
    const GridFunction back = grid_sample(FieldSpec::parse("table:" + path.string()), s.grid);
    CHECK(back.values() == u.values());
    std::filesystem::remove(path);
}
