#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "platoon/controller.hpp"

using namespace platoon;

namespace {

PlatoonModel small_platoon(std::size_t n, double eps, const GainSet& g = GainSet::published()) {
    PlatoonModel m;
    m.params.assign(n, VehicleParams{1.0, 1.0, eps});
    m.spacing = SpacingPolicy::uniform(n, 10.0);
    m.reference = {0.0, 20.0};
    m.disturbance.gammas.assign(n, 0.0);
    m.gains = g;
    return m;
}

std::vector<VehicleState> desired_platoon(const PlatoonModel& m, double t) {
    std::vector<VehicleState> x(m.size());
    for (std::size_t i = 1; i <= m.size(); ++i) x[i - 1] = desired_configuration(i, t, m.reference, m.spacing);
    return x;
}

}  // namespace

TEST_CASE("couplings vanish at the desired configuration") {
    const auto m = small_platoon(5, 1.0);
    for (double t : {0.0, 3.7, 55.0}) {
        const auto x = desired_platoon(m, t);
        for (std::size_t i = 1; i <= 5; ++i) {
            const auto view = m.view(x, i, t);
            const auto h = coupling_h(view, m.gains, m.spacing);
            const auto g = coupling_g(view, m.gains, m.spacing);
            CHECK(h.pred == 0.0);
            CHECK(h.foll == 0.0);
            CHECK(h.leader == 0.0);
            CHECK(g.pred == 0.0);
            CHECK(g.foll == 0.0);
            CHECK(g.leader == 0.0);
            const auto c = control_input(view, m.gains, 1.0, m.spacing);
            CHECK(c.u_bar == 0.0);
            CHECK(c.zeta_dot == 0.0);
        }
    }
}

TEST_CASE("coupling examples") {
    const auto spacing = SpacingPolicy::uniform(3, 10.0);
    const GainSet g = GainSet::published();

    NeighborView v;
    v.index = 2;
    v.own = {-20.0, 20.0, 0.0, 0.0};
    v.predecessor = VehicleState{-9.0, 20.0, 0.0, 0.0};  // 1 m too far ahead
    v.q0 = 0.0;
    v.v0 = 20.0;
    CHECK(coupling_h(v, g, spacing).pred == doctest::Approx(0.001).epsilon(1e-12));

    // Leader error (2, 1): 0.4631*2 + 0.7*1.
    v.predecessor.reset();
    v.own = {-22.0, 19.0, 0.0, 0.0};
    CHECK(coupling_h(v, g, spacing).leader == doctest::Approx(0.9262 + 0.7).epsilon(1e-12));
    CHECK(coupling_h(v, g, spacing).leader == doctest::Approx(1.6262).epsilon(1e-12));

    // Leader error (1, 0) through the G-gains.
    v.own = {-21.0, 20.0, 0.0, 0.0};
    CHECK(coupling_g(v, g, spacing).leader == doctest::Approx(0.1430).epsilon(1e-12));

    // Predecessor errors (2, -1): 0.001*2 - 0.001.
    v.own = {-20.0, 21.0, 0.0, 0.0};
    v.predecessor = VehicleState{-8.0, 20.0, 0.0, 0.0};
    CHECK(coupling_g(v, g, spacing).pred == doctest::Approx(0.001).epsilon(1e-12));
}

TEST_CASE("control input sums the couplings and the integrator") {
    const auto m = small_platoon(3, 1.0);
    auto x = desired_platoon(m, 0.0);
    x[1].zeta = 1.0;
    const auto c = control_input(m.view(x, 2, 0.0), m.gains, 1.0, m.spacing);
    CHECK(c.u_bar == doctest::Approx(0.1436));
    CHECK(c.zeta_dot == 0.0);

    // Predecessor and follower each 500 m off with only Kp1 = Kp2 = 0.001: 0.5 + eps*0.5 + leader.
    GainSet g;
    g.kp1 = g.kp2 = 0.001;
    g.kp0 = 1.0;
    NeighborView v;
    v.index = 2;
    v.own = {-20.0, 20.0, 0.0, 0.0};
    v.predecessor = VehicleState{490.0, 20.0, 0.0, 0.0};
    v.follower = VehicleState{470.0, 20.0, 0.0, 0.0};
    v.q0 = 1.0;
    v.v0 = 20.0;
    CHECK(control_input(v, g, 1.0, SpacingPolicy::uniform(3, 10.0)).u_bar == doctest::Approx(2.0));
}

TEST_CASE("first vehicle coupling") {
    auto m = small_platoon(2, 1.0);
    const auto x = desired_platoon(m, 0.0);
    CHECK_FALSE(m.view(x, 1, 0.0).predecessor.has_value());
    m.first_vehicle = FirstVehicleCoupling::reference_as_predecessor;
    const auto v = m.view(x, 1, 2.0);
    REQUIRE(v.predecessor.has_value());
    CHECK(v.predecessor->q == 40.0);
    CHECK_FALSE(m.view(x, 2, 0.0).follower.has_value());
}

TEST_CASE("build_T and build_phi") {
    CHECK(build_T({0, 0, 0, 0}) == Mat4::identity());
    const Mat4 t = build_T(TransformParams::published());
    CHECK(t(1, 3) == 0.7);
    CHECK(t(2, 3) == -0.5);
    CHECK(t(0, 1) == 0.8);
    const auto sv = singular_values(t);
    CHECK(sv[0] * sv[1] * sv[2] * sv[3] == doctest::Approx(1.0).epsilon(1e-12));

    const Mat4 phi = build_phi({1.0, 1.0, 1.0});
    CHECK(phi(1, 2) == 1.0);
    CHECK(phi(2, 2) == -1.0);
    CHECK(build_phi({2.0, 1.0, 1.0})(1, 2) == 0.5);
    CHECK(build_phi({1.0, 0.5, 1.0})(2, 2) == -2.0);
}

TEST_CASE("jacobian block structure") {
    const VehicleParams p{1.0, 2.0, 1.0};
    const auto zero = jacobian_blocks(p, GainSet{}, 1.0, Mat4::identity());
    CHECK(zero.own == build_phi(p));
    CHECK(mu2(zero.own) >= 0.0);

    GainSet g;
    g.kp1 = 0.3;
    const auto j = jacobian_blocks(p, g, 1.0, Mat4::identity());
    CHECK(j.pred(2, 0) == doctest::Approx(0.15));
    Mat4 expected;
    expected(2, 0) = 0.15;
    CHECK((j.pred - expected).max_abs() == 0.0);
}

TEST_CASE("jacobian blocks match finite differences of the transformed field") {
    // Middle vehicle of a three-vehicle platoon sees both neighbours.
    for (double eps : {1.0, 0.4}) {
        auto m = small_platoon(3, eps);
        m.params[1].tau = 0.8;
        m.params[1].mass = 1.3;
        m.disturbance.gammas = {0.2, 0.6, 0.9};
        const Mat4 T = build_T(TransformParams::published());
        const Mat4 t_inv = inverse(T);
        const auto blocks = jacobian_blocks(m.params[1], m.gains, eps, T);

        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        const double t = 4.0;

        for (int trial = 0; trial < 10; ++trial) {
            std::vector<Vec4> y(3);
            for (auto& yi : y)
                for (double& c : yi) c = u(rng);

            auto field = [&](const std::vector<Vec4>& ys) {
                std::vector<VehicleState> x(3);
                for (std::size_t i = 1; i <= 3; ++i) {
                    const Vec4 e = t_inv * ys[i - 1];
                    const auto d = desired_configuration(i, t, m.reference, m.spacing);
                    const double w_bar = m.disturbance.constant_part(i);
                    x[i - 1] = {d.q + e[0], d.v + e[1], e[2] - w_bar, e[3] - w_bar / m.gains.k};
                }
                const auto dx = closed_loop_derivative(m, x, t);
                // Time derivative of the shifted error, then into transformed coordinates.
                const VehicleState& s = dx[1];
                return T * Vec4{s.q - m.reference.v0, s.v, s.f, s.zeta};
            };

            const double h = 1e-5;
            const std::array<std::pair<std::size_t, Mat4>, 3> cases{
                std::pair{std::size_t{1}, blocks.own}, std::pair{std::size_t{0}, blocks.pred},
                std::pair{std::size_t{2}, blocks.foll * eps}};
            for (const auto& [nb, J] : cases) {
                for (int c = 0; c < 4; ++c) {
                    auto yp = y, ym = y;
                    yp[nb][c] += h;
                    ym[nb][c] -= h;
                    const Vec4 fp = field(yp), fm = field(ym);
                    for (int r = 0; r < 4; ++r) CHECK(std::abs((fp[r] - fm[r]) / (2 * h) - J(r, c)) <= 1e-6);
                }
            }
        }
    }
}

TEST_CASE("closed loop equilibrium motion") {
    const auto m = small_platoon(4, 1.0);
    auto dm = m;
    dm.disturbance.constant = false;
    dm.disturbance.time_varying = false;
    const auto x = desired_platoon(dm, 1.0);
    for (const auto& d : closed_loop_derivative(dm, x, 1.0)) {
        CHECK(d.q == 20.0);
        CHECK(d.v == 0.0);
        CHECK(d.f == 0.0);
        CHECK(d.zeta == 0.0);
    }
}

TEST_CASE("single vehicle disturbed equilibrium") {
    auto m = small_platoon(1, 1.0);
    m.disturbance.gammas = {0.4};
    m.disturbance.time_varying = false;
    const double w_bar = 1.4;
    auto x = desired_platoon(m, 0.0);
    x[0].f = -w_bar;
    x[0].zeta = -w_bar / m.gains.k;
    const auto d = closed_loop_derivative(m, x, 0.0);
    CHECK(d[0].v == doctest::Approx(0.0).scale(1.0));
    CHECK(d[0].f == doctest::Approx(0.0).scale(1.0));
    CHECK(d[0].zeta == 0.0);

    const Vec4 e = to_transformed(x[0], w_bar, m.gains, build_T(TransformParams::published()),
                                  desired_configuration(1, 0.0, m.reference, m.spacing));
    CHECK(norm2(e) <= 1e-12);
}

TEST_CASE("actuator lag with zero gains") {
    auto m = small_platoon(1, 1.0, GainSet{});
    m.params[0].tau = 2.0;
    m.disturbance.constant = false;
    auto x = desired_platoon(m, 0.0);
    x[0].f = 1.0;
    CHECK(closed_loop_derivative(m, x, 0.0)[0].f == -0.5);
}

TEST_CASE("to_transformed") {
    const VehicleState desired{-10.0, 20.0, 0.0, 0.0};
    const VehicleState s{-8.0, 21.0, 3.0, 4.0};
    GainSet g = GainSet::published();
    const Vec4 e = to_transformed(s, 0.0, g, Mat4::identity(), desired);
    CHECK(e == Vec4{2.0, 1.0, 3.0, 4.0});
    CHECK(norm2(to_transformed(desired, 0.0, g, build_T(TransformParams::published()), desired)) == 0.0);
    g.k = 0.0;
    CHECK_THROWS(to_transformed(s, 0.0, g, Mat4::identity(), desired));
}

TEST_CASE("unit upper-triangular transforms keep a zero first diagonal entry") {
    // Column 0 of J_ii is nonzero only in rows 2 and 3, which row 0 of T never
    // reaches, so mu2(J_ii) >= 0 for any gains and alphas.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        GainSet g;
        auto a = g.to_array();
        for (double& x : a) x = pos(rng);
        g = GainSet::from_array(a);
        const Mat4 T = build_T({u(rng), u(rng), u(rng), u(rng)});
        const auto j = jacobian_blocks({1.0, 0.2 + pos(rng), 1.0}, g, pos(rng), T);
        CHECK(std::abs(j.own(0, 0)) <= 1e-12);
        CHECK(mu2(j.own) >= -1e-12);
    }
}
