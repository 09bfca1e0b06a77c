#include <cmath>
#include <vector>

#include "doctest.h"
#include "ksing/radial.hpp"

using namespace ksing;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("geometric grid places nodes log-uniformly") {
    RadialGrid g = RadialGrid::geometric(0.25, 3);
    REQUIRE(g.size() == 3);
    CHECK(g.nodes[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.nodes[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.nodes[2] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.log_step == doctest::Approx(std::log(2.0)).epsilon(1e-14));

    GridPtr fine = make_grid(1e-6, 257);
    for (int i = 0; i + 1 < fine->size(); ++i) {
        const double ratio = fine->nodes[i + 1] / fine->nodes[i];
        CHECK(std::abs(std::log(ratio) - fine->log_step) <= 1e-12);
    }
    CHECK(fine->nodes.back() == 1.0);
}

TEST_CASE("grid contract rejects degenerate requests") {
    CHECK_THROWS_AS(make_grid(1e-6, 15), DomainError);
    CHECK_THROWS_AS(make_grid(0.0, 64), DomainError);
    CHECK_THROWS_AS(make_grid(1.5, 64), DomainError);
    CHECK(default_grid()->size() == kDefaultNodes);
    CHECK(default_grid()->r_min == kDefaultRMin);
}

TEST_CASE("radial function constructor validates sizes") {
    GridPtr g = make_grid(1e-3, 32);
    std::vector<double> good(32, 1.0), bad(31, 1.0);
    CHECK_NOTHROW(RadialFn(g, good));
    CHECK_THROWS_AS(RadialFn(g, bad), DomainError);
    RadialFn u(g, good, SingularTag::power(-1.0), 2.0);
    CHECK(u.tag.alpha == -1.0);
    CHECK(u.singular_coeff == 2.0);
    CHECK(u.sup_abs() == 1.0);
}

TEST_CASE("parameter helpers") {
    Params P3{3, 2.0, -1.0, 1.0};
    CHECK(P3.p_star() == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(P3.theta_minus() == -1.0);
    CHECK(P3.sigma_N() == doctest::Approx(4.0 * kPi).epsilon(1e-15));
    CHECK(P3.c_N() == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-15));

    Params P2{2, 2.0, 0.5, 1.0};
    CHECK(std::isinf(P2.p_star()));
    CHECK(P2.theta_minus() == 0.0);
    CHECK(P2.sigma_N() == doctest::Approx(2.0 * kPi).epsilon(1e-15));
    CHECK(P2.c_N() == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));

    Params P4{4, 1.5, 0.0, 1.0};
    CHECK(P4.p_star() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(P4.sigma_N() == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-14));

    CHECK_THROWS_AS(Params({1, 2.0, 0.0, 1.0}).validate(), DomainError);
    CHECK_THROWS_AS(Params({3, 1.0, 0.0, 1.0}).validate(), DomainError);
}

TEST_CASE("t-quadrature converges at fourth order") {
    // integral of e^{2t} over [ln r_min, 0] = (1 - r_min^2)/2
    auto run = [](int n) {
        GridPtr g = make_grid(1e-2, n);
        std::vector<double> f(g->size());
        for (int i = 0; i < g->size(); ++i) f[i] = g->nodes[i] * g->nodes[i];
        const double exact = 0.5 * (1.0 - 1e-4);
        return std::abs(integrate_t(*g, f) - exact);
    };
    const double e1 = run(129), e2 = run(257);
    CHECK(e1 <= 1e-6);
    CHECK(e1 / e2 >= 10.0);
}

TEST_CASE("cumulative rules agree with the total and with each other") {
    GridPtr g = make_grid(1e-3, 181);
    std::vector<double> f(g->size());
    for (int i = 0; i < g->size(); ++i) f[i] = std::sin(3.0 * g->nodes[i]) + 2.0;
    const double total = integrate_t(*g, f);
    std::vector<double> c = cumulative_from_start_t(*g, f);
    std::vector<double> b = cumulative_to_end_t(*g, f);
    CHECK(c.front() == 0.0);
    CHECK(b.back() == 0.0);
    CHECK(c.back() == doctest::Approx(total).epsilon(1e-12));
    CHECK(b.front() == doctest::Approx(total).epsilon(1e-12));
    for (int i = 0; i < g->size(); i += 17)
        CHECK(c[i] + b[i] == doctest::Approx(total).epsilon(1e-10));
}

TEST_CASE("t-derivative converges at fourth order") {
    auto run = [](int n) {
        GridPtr g = make_grid(1e-2, n);
        std::vector<double> f(g->size());
        for (int i = 0; i < g->size(); ++i) f[i] = std::sin(std::log(g->nodes[i]));
        std::vector<double> d = derivative_t(*g, f);
        double err = 0.0;
        for (int i = 0; i < g->size(); ++i)
            err = std::max(err, std::abs(d[i] - std::cos(std::log(g->nodes[i]))));
        return err;
    };
    const double e1 = run(129), e2 = run(257);
    CHECK(e1 <= 1e-6);
    CHECK(e1 / e2 >= 10.0);
}

TEST_CASE("upper incomplete gamma covers all real orders") {
    CHECK(upper_gamma(1.0, 0.7) == doctest::Approx(std::exp(-0.7)).epsilon(1e-14));
    // E1(1), classical tabulated value
    CHECK(upper_gamma(0.0, 1.0) == doctest::Approx(0.21938393439552029).epsilon(1e-12));
    // recurrence Γ(a+1,x) = a Γ(a,x) + x^a e^{-x} across zero and negative orders
    for (double a : {-2.3, -1.0, -0.5, 0.5, 2.2}) {
        const double x = 0.7;
        const double lhs = upper_gamma(a + 1.0, x);
        const double rhs = a * upper_gamma(a, x) + std::pow(x, a) * std::exp(-x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
    CHECK(upper_gamma(-1.0, 1.0) ==
          doctest::Approx(std::exp(-1.0) - 0.21938393439552029).epsilon(1e-11));
}

TEST_CASE("closed-form head integrals") {
    // pure power: c ∫_0^a r^m dr = c a^{m+1}/(m+1)
    CHECK(head_power_log(2.0, 1.5, 0.0, 0.3) ==
          doctest::Approx(2.0 * std::pow(0.3, 2.5) / 2.5).epsilon(1e-13));
    // single log: ∫_0^a (-ln r) dr = a (1 - ln a)
    CHECK(head_power_log(1.0, 0.0, 1.0, 0.5) ==
          doctest::Approx(0.5 * (1.0 + std::log(2.0))).epsilon(1e-13));
    // borderline power with strong log damping: ∫_0^a r^{-1} (-ln r)^{-2} dr = 1/ln(1/a)
    CHECK(head_power_log(1.0, -1.0, -2.0, 0.1) ==
          doctest::Approx(1.0 / std::log(10.0)).epsilon(1e-12));
    CHECK(head_power_log(5.0, 2.0, 0.0, 1.0) == doctest::Approx(5.0 / 3.0).epsilon(1e-13));

    CHECK_THROWS_AS(head_power_log(1.0, -1.0, -1.0, 0.5), DivergenceError);
    CHECK_THROWS_AS(head_power_log(1.0, -1.0, 0.0, 0.5), DivergenceError);
    CHECK_THROWS_AS(head_power_log(1.0, -1.2, 0.0, 0.5), DivergenceError);
}

TEST_CASE("weighted L1 norm matches hand integrals") {
    GridPtr g = default_grid();

    // u = 1 - r, N = 3: 4π ∫ (1-r) r^2 dr = π/3
    std::vector<double> v(g->size());
    for (int i = 0; i < g->size(); ++i) v[i] = 1.0 - g->nodes[i];
    RadialFn u(g, v);
    CHECK(l1_norm(u, 3) == doctest::Approx(kPi / 3.0).epsilon(1e-9));

    // u = 1/r tagged, N = 2: 2π ∫ r^{-1} r dr = 2π
    std::vector<double> w(g->size());
    for (int i = 0; i < g->size(); ++i) w[i] = 1.0 / g->nodes[i];
    RadialFn s(g, w, SingularTag::power(-1.0), 1.0);
    CHECK(l1_norm(s, 2) == doctest::Approx(2.0 * kPi).epsilon(1e-9));
}

TEST_CASE("monotonicity probe sign") {
    GridPtr g = make_grid(1e-3, 64);
    std::vector<double> dec(g->size()), inc(g->size());
    for (int i = 0; i < g->size(); ++i) {
        dec[i] = 1.0 - g->nodes[i];
        inc[i] = g->nodes[i];
    }
    CHECK(max_increase(RadialFn(g, dec)) < 0.0);
    CHECK(max_increase(RadialFn(g, inc)) > 0.0);
}
