#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "vwflow/errors.hpp"
#include "vwflow/flow.hpp"

using namespace vwflow;

namespace {
InitialEnsemble single(PlaneVec x) {
    InitialEnsemble e;
    e.center = x;
    e.radius = 1.0;
    e.spacing = 1.0;
    e.points = {x};
    e.cell_weight = 1.0;
    return e;
}

TimeVaryingField known_constant(PlaneVec v) {
    auto f = TimeVaryingField::constant(v);
    f.sup_norm = norm(v);
    f.div_sup_integral = 0.0;
    return f;
}

// Endpoint of the regularized rotation: angular speed 1/(r^2 + 1/n^2) on the circle of radius r.
PlaneVec rotation_oracle(PlaneVec x0, long n, double t) {
    const double r = norm(x0);
    const double omega = 1.0 / (r * r + 1.0 / (static_cast<double>(n) * static_cast<double>(n)));
    const double a = std::atan2(x0.x2, x0.x1) + omega * t;
    return {r * std::cos(a), r * std::sin(a)};
}
}  // namespace

TEST_CASE("disk ensemble construction") {
    const auto e = make_disk_ensemble({0.5, -0.25}, 1.0, 0.1);
    CHECK(e.cell_weight == doctest::Approx(0.01));
    CHECK(e.points.size() > 300);
    CHECK(e.points.size() < 330);
    for (std::size_t i = 0; i < e.points.size(); ++i) {
        CHECK(norm(e.points[i] - e.center) <= 1.0);
        for (std::size_t j = i + 1; j < e.points.size(); ++j) CHECK_FALSE(e.points[i] == e.points[j]);
    }
    CHECK_THROWS_AS(make_disk_ensemble({0, 0}, -1.0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(make_disk_ensemble({0, 0}, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("uniform times") {
    const auto t = uniform_times(2.0, 5);
    REQUIRE(t.size() == 5);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == 2.0);
    CHECK(t[2] == 1.0);
    CHECK(uniform_times(0.0, 7) == std::vector<double>{0.0});
}

TEST_CASE("constant translation with a distant vortex") {
    const auto far = PointVortexPath::constant({1e6, 0}, 1.0);
    const auto b = make_composite(known_constant({1, 0}), far, RegularizationLevel(10));
    const auto times = uniform_times(1.0, 2);
    const auto tr = integrate_flow(b, single({0, 0}), 1.0, 0.01, times);
    // The far vortex still pushes along x2 by int_0^1 ds / (s - 1e6).
    const PlaneVec end = tr.position(0, 1);
    CHECK(std::abs(end.x1 - 1.0) < 1e-12);
    CHECK(std::abs(end.x2 - std::log1p(-1e-6)) < 1e-12);
    CHECK(tr.min_distance[0] >= 1e6 - 1.0 - 1e-6);
}

TEST_CASE("rotation oracle at high level") {
    const long n = 10000;
    const auto origin = PointVortexPath::constant({0, 0}, std::numbers::pi / 2);
    const auto b = make_composite(known_constant({0, 0}), origin, RegularizationLevel(n));
    const double T = std::numbers::pi / 2;
    const auto tr = integrate_flow(b, single({1, 0}), T, T / 1000, uniform_times(T, 3));
    const PlaneVec end = tr.position(0, 2);
    CHECK(norm(end - PlaneVec{0, 1}) < 1e-3);
    CHECK(norm(end - rotation_oracle({1, 0}, n, T)) < 1e-9);
    CHECK(tr.min_distance[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("integrator is fourth order when the macro step is active") {
    const long n = 1;
    const auto origin = PointVortexPath::constant({0, 0}, 1.0);
    const auto b = make_composite(known_constant({0, 0}), origin, RegularizationLevel(n));
    const auto times = uniform_times(1.0, 2);
    double err[2];
    int k = 0;
    for (double dt : {0.1, 0.05}) {
        const auto tr = integrate_flow(b, single({1, 0}), 1.0, dt, times);
        CHECK(tr.max_substep == doctest::Approx(dt));
        err[k++] = norm(tr.position(0, 1) - rotation_oracle({1, 0}, n, 1.0));
    }
    CHECK(err[0] > 1e-12);
    CHECK(err[0] / err[1] >= 8.0);
}

TEST_CASE("zero horizon returns the initial grid") {
    const auto path = PointVortexPath::constant({0.3, 0.1}, 0.0);
    const auto b = make_composite(known_constant({1, 2}), path, RegularizationLevel(4));
    const auto e = make_disk_ensemble({0, 0}, 1.0, 0.25);
    const auto tr = integrate_flow(b, e, 0.0, 0.1, uniform_times(0.0, 9));
    REQUIRE(tr.time_count() == 1);
    for (std::size_t i = 0; i < e.points.size(); ++i) {
        CHECK(tr.position(i, 0) == e.points[i]);
        CHECK(tr.min_distance[i] == norm(e.points[i] - PlaneVec{0.3, 0.1}));
    }
    const auto d = pushforward_density(tr, 0, 0.25);
    CHECK(d.max == doctest::Approx(1.0));
    CHECK(d.cells.at({0, 0}) == doctest::Approx(1.0));
}

TEST_CASE("integrate_flow argument checks") {
    const auto origin = PointVortexPath::constant({0, 0}, 1.0);
    const auto exact = make_composite(known_constant({0, 0}), origin, std::nullopt);
    const auto b = make_composite(known_constant({0, 0}), origin, RegularizationLevel(2));
    const auto e = single({1, 0});
    const auto times = uniform_times(1.0, 3);
    CHECK_THROWS_AS(integrate_flow(exact, e, 1.0, 0.1, times), UnsupportedOperation);
    CHECK_THROWS_AS(integrate_flow(b, e, 1.0, 0.0, times), InvalidArgument);
    CHECK_THROWS_AS(integrate_flow(b, e, 1.0, -1.0, times), InvalidArgument);
    CHECK_THROWS_AS(integrate_flow(b, e, 2.0, 0.1, uniform_times(2.0, 3)), InvalidArgument);
    const std::vector<double> unsorted{0.0, 0.7, 0.5};
    CHECK_THROWS_AS(integrate_flow(b, e, 1.0, 0.1, unsorted), InvalidArgument);
    const std::vector<double> late{0.0, 1.5};
    CHECK_THROWS_AS(integrate_flow(b, e, 1.0, 0.1, late), InvalidArgument);
}

TEST_CASE("pure rotation keeps every radius and all invariants") {
    const auto origin = PointVortexPath::constant({0, 0}, 1.0);
    const auto b = make_composite(known_constant({0, 0}), origin, RegularizationLevel(16));
    const auto e = make_disk_ensemble({0, 0}, 1.0, 1.0 / 16);
    const auto tr = integrate_flow(b, e, 1.0, 1.0 / 256, uniform_times(1.0, 17));
    for (std::size_t i = 0; i < e.points.size(); ++i)
        CHECK(tr.min_distance[i] == doctest::Approx(norm(e.points[i])).epsilon(1e-5));
    CHECK(min_distance_profile(tr) == tr.min_distance);
    const auto inv = check_flow_invariants(tr, b, e, 1.0 / 256);
    CHECK(inv.ok());
    CHECK(confinement_radius(b, e, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("trajectories are independent of the thread count") {
    auto v = TimeVaryingField::constant({0.1, 0});
    v.velocity = [](double t, PlaneVec x) { return PlaneVec{0.2 * std::sin(x.x2 + t), 0.1 * x.x1}; };
    v.sup_norm = 0.4;
    const auto path = PointVortexPath::from_samples({0.0, 0.5, 1.0}, {{0, 0}, {0.2, 0.1}, {0.3, -0.2}});
    const auto b = make_composite(v, path, RegularizationLevel(8));
    const auto e = make_disk_ensemble({0, 0}, 1.0, 0.1);
    const auto times = uniform_times(1.0, 9);
    const auto one = integrate_flow(b, e, 1.0, 0.05, times, 1);
    for (int threads : {2, 3, 8}) {
        const auto many = integrate_flow(b, e, 1.0, 0.05, times, threads);
        CHECK(many.positions == one.positions);
        CHECK(many.min_distance == one.min_distance);
    }
}

TEST_CASE("constant divergence contracts or expands area") {
    const double c = 0.4;
    TimeVaryingField v;
    v.velocity = [c](double, PlaneVec x) { return (0.5 * c) * x; };
    v.divergence = [c](double, PlaneVec) { return c; };
    v.sup_norm = 2.0;
    v.already_smooth = true;
    const auto far = PointVortexPath::constant({1e3, 0}, 1.0);
    const auto b = make_composite(v, far, RegularizationLevel(4));
    const auto e = make_disk_ensemble({0, 0}, 1.0, 1.0 / 64);
    const auto tr = integrate_flow(b, e, 1.0, 1.0 / 64, uniform_times(1.0, 5));
    for (std::size_t k = 0; k < tr.time_count(); ++k) {
        const auto d = pushforward_density(tr, k, 0.25);
        CHECK(d.cells.at({0, 0}) == doctest::Approx(std::exp(-c * tr.output_times[k])).epsilon(0.02));
    }
}

TEST_CASE("pushforward density argument checks") {
    const auto path = PointVortexPath::constant({0, 0}, 0.0);
    const auto b = make_composite(known_constant({0, 0}), path, RegularizationLevel(4));
    const auto tr = integrate_flow(b, single({1, 0}), 0.0, 0.1, uniform_times(0.0, 1));
    CHECK_THROWS_AS(pushforward_density(tr, 1, 0.1), InvalidArgument);
    CHECK_THROWS_AS(pushforward_density(tr, 0, 0.0), InvalidArgument);
}
