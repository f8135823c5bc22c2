#include <doctest.h>

#include "rtsmp/errors.hpp"
#include "rtsmp/reach.hpp"
#include "support.hpp"

#include <cmath>
#include <sstream>

using namespace rtsmp;
using namespace rtsmp::test;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

Mask single(const Domain& d, Index node) {
    Mask m(d.node_count(), false);
    m[node] = true;
    return m;
}

Index count(const Mask& m) {
    Index n = 0;
    for (bool b : m) n += b ? 1 : 0;
    return n;
}

}  // namespace

TEST_CASE("trajectory integration") {
    const DriftField vel1 = DriftField::velocity(1);
    TrajectorySpec a;
    a.start = vec({0.0});
    a.velocity = {{1.0, vec({0.5})}, {0.25, vec({-2.0})}};
    const Trajectory ta = integrate_trajectory(a, vel1);
    CHECK(ta.points.back().t == doctest::Approx(1.25));
    CHECK(ta.points.back().x[0] == doctest::Approx(0.0));
    CHECK(std::isinf(ta.exit_time));

    const Scenario s22 = example("2.2", {{"domain_x", "resolution", "11"}});
    TrajectorySpec m;
    m.start = vec({0.1, 0.2});
    m.velocity = {{0.3, vec({1.0, 0.0})}, {0.4, vec({0.0, 1.0})}};
    m.dt = 0.07;
    const Trajectory tm = integrate_trajectory(m, s22.drift, &s22.x_domain);
    CHECK(tm.points.back().x[0] == doctest::Approx(0.4));
    CHECK(tm.points.back().x[1] == doctest::Approx(0.6));
    CHECK(std::isinf(tm.exit_time));

    const Scenario s21 = example("2.1", {{"domain_x", "resolution", "11"}});
    TrajectorySpec out;
    out.start = vec({0.0});
    out.velocity = {{3.0, vec({1.0})}};
    CHECK(integrate_trajectory(out, s21.drift, &s21.x_domain).exit_time == doctest::Approx(1.0).epsilon(1e-9));

    const Scenario s26 = example("2.6", {{"domain_x", "resolution", "8"}, {"measure", "nodes", "4"}});
    const double gamma = std::sqrt(2.0) - 1.0;
    TrajectorySpec tor;
    tor.start = vec({0.0, 0.0});
    tor.control = {{2.5, Vector::Zero(0)}};
    tor.velocity = {{2.5, vec({0.0, 0.0})}};
    tor.dt = 0.1;
    const Trajectory tt = integrate_trajectory(tor, s26.drift, &s26.x_domain);
    for (const PathPoint& p : tt.points) {
        CHECK(s26.x_domain.displacement(p.x, vec({p.t, gamma * p.t})).norm() <= 1e-9);
        CHECK((p.x.array() >= 0.0).all());
        CHECK((p.x.array() < 1.0).all());
    }

    TrajectorySpec bad = a;
    bad.velocity = {{-1.0, vec({1.0})}};
    CHECK_THROWS_AS(integrate_trajectory(bad, vel1), ValidationError);
}

TEST_CASE("reach_step examples") {
    const Scenario s21 = example("2.1", {{"domain_x", "resolution", "21"}});
    const double h = s21.x_domain.spacing(0);
    const Mask from_centre = reach_step(single(s21.x_domain, 10), s21, 3 * h);
    for (Index i = 0; i < 21; ++i) CHECK(from_centre[i] == (std::abs(i - 10) <= 3));

    const Scenario s25 = example("2.5", {{"domain_x", "resolution", "21"}});
    const Mask right = reach_step(single(s25.x_domain, 10), s25, default_horizon(s25));
    for (Index i = 0; i < 21; ++i) CHECK(right[i] == (i >= 10));

    const Scenario still = example("2.1", {{"domain_x", "resolution", "21"}, {"drift", "kind", "constant"},
                                           {"drift", "vector", "(0)"}});
    const Mask same = reach_step(single(still.x_domain, 4), still, 1.0);
    CHECK(count(same) == 1);
    CHECK(same[4]);

    CHECK_THROWS_AS(reach_step(Mask(21, false), s21, 1.0), PreconditionError);
}

TEST_CASE("reachable sets and arrival times") {
    const Scenario s22 = example("2.2", {{"domain_x", "resolution", "41"}});
    const Domain& d = s22.x_domain;
    const Index a = d.nearest_node(vec({0.2, 0.3}));
    const ReachReport r = reachable_set(single(d, a), s22);
    CHECK(r.converged);
    CHECK(r.controllable);
    const double cell = d.spacings().norm();
    const Index b = d.nearest_node(vec({0.8, 0.9}));
    const Vector diff = d.point(b) - d.point(a);
    CHECK(std::abs(r.arrival[b] - diff.lpNorm<1>()) <= 2 * cell);
    CHECK(r.arrival[a] == 0.0);
    CHECK(r.first_k[a] == 0);
    for (std::size_t k = 1; k < r.masks.size(); ++k)
        for (Index i = 0; i < d.node_count(); ++i) CHECK((!r.masks[k - 1][i] || r.masks[k][i]));

    const Scenario s25 = example("2.5", {{"domain_x", "resolution", "41"}});
    const Index zero = s25.x_domain.nearest_node(vec({0.0}));
    const ReachReport r25 = reachable_set(single(s25.x_domain, zero), s25);
    CHECK_FALSE(r25.controllable);
    for (Index i = 0; i < 41; ++i) CHECK(r25.masks.back()[i] == (i >= zero));
    for (Index i = 0; i < zero; ++i) {
        CHECK(std::isinf(r25.arrival[i]));
        CHECK(r25.first_k[i] == -1);
    }
}

TEST_CASE("ergodic flow on the torus is dense") {
    const Scenario s = example("2.6", {{"domain_x", "resolution", "32"}, {"measure", "nodes", "4"}});
    const ReachReport r = reachable_set(single(s.x_domain, 0), s);
    const Mask& m = r.masks.back();
    const Domain& d = s.x_domain;
    for (Index i = 0; i < d.node_count(); ++i) {
        double best = 1e9;
        for (Index j = 0; j < d.node_count(); ++j)
            if (m[j]) best = std::min(best, d.displacement(d.point(i), d.point(j)).norm());
        CHECK(best <= 0.05);
    }
}

TEST_CASE("one-segment arrival times are exact on the line") {
    const Scenario s = example("2.1", {{"domain_x", "resolution", "33"}});
    const Domain& d = s.x_domain;
    for (Index a : {0, 7, 16, 32}) {
        const ReachReport r = reachable_set(single(d, a), s);
        for (Index b = 0; b < 33; ++b) CHECK(r.arrival[b] == doctest::Approx(std::abs(d.point(b)[0] - d.point(a)[0])).epsilon(1e-12));
        const ReachReport mirror = reachable_set(single(d, 32 - a), s);
        for (Index b = 0; b < 33; ++b) {
            CHECK(mirror.arrival[32 - b] == r.arrival[b]);
            CHECK(mirror.first_k[32 - b] == r.first_k[b]);
        }
    }
}

TEST_CASE("controllability") {
    CHECK(is_controllable(example("2.1", {{"domain_x", "resolution", "33"}})).controllable);
    CHECK(is_controllable(example("2.2", {{"domain_x", "resolution", "17"}})).controllable);
    CHECK(is_controllable(example("2.3", {{"domain_x", "resolution", "25"}, {"measure", "nodes", "16"}})).controllable);

    const Scenario s25 = example("2.5", {{"domain_x", "resolution", "33"}});
    const Controllability c = is_controllable(s25);
    CHECK_FALSE(c.controllable);
    REQUIRE(c.from >= 0);
    REQUIRE(c.to >= 0);
    CHECK(s25.x_domain.point(c.to)[0] < s25.x_domain.point(c.from)[0]);
    const ReachReport r = reachable_set(single(s25.x_domain, c.from), s25);
    CHECK_FALSE(r.masks.back()[c.to]);
    CHECK(c.capture_radius == doctest::Approx(0.5 * s25.x_domain.spacing(0) * (1 + 1e-9)));
}

TEST_CASE("mask text round trip and reach csv") {
    Gen gen(31);
    for (const char* name : {"2.1", "2.2"}) {
        const Scenario s = example(name, {{"domain_x", "resolution", "9"}});
        for (int t = 0; t < 20; ++t) {
            Mask m(s.x_domain.node_count());
            for (Index i = 0; i < s.x_domain.node_count(); ++i) m[i] = gen.coin();
            CHECK(mask_from_bits(mask_bits(m, s.x_domain), s.x_domain) == m);
        }
    }
    const Scenario s = example("2.1", {{"domain_x", "resolution", "5"}});
    const ReachReport r = reachable_set(single(s.x_domain, 0), s);
    std::ostringstream out;
    write_reach_csv(out, r, s.x_domain);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "i_0,x_0,arrival_time,first_k");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 5);
}
