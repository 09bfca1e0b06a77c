#include <cmath>
#include <vector>

#include "doctest.h"
#include "ksing/green.hpp"
#include "ksing/mass.hpp"
#include "ksing/radial.hpp"

using namespace ksing;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("gradient mass of the Dirac potential is the unit mass") {
    GridPtr g = default_grid();
    for (int N : {2, 3}) {
        Params P{N, 2.0, 0.0, 1.0};
        MassReport rep = gradient_mass(dirac_potential(P, g), P);
        CHECK(rep.grad_mass == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(rep.m_theta == doctest::Approx(1.0).epsilon(1e-6));
    }
    Params Pth{3, 2.0, -0.75, 1.0};
    MassReport rep = gradient_mass(dirac_potential(Pth, g), Pth);
    CHECK(rep.m_theta == doctest::Approx(0.25).epsilon(1e-5));
}

TEST_CASE("gradient mass of a smooth cone") {
    // u = 1 - r, N = 3: ∫ |∇u| = 4π/3
    GridPtr g = default_grid();
    Params P{3, 2.0, 0.0, 1.0};
    std::vector<double> v(g->size());
    for (int i = 0; i < g->size(); ++i) v[i] = 1.0 - g->nodes[i];
    MassReport rep = gradient_mass(RadialFn(g, v), P);
    CHECK(rep.grad_mass == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-8));
    CHECK(rep.boundary_flux_term == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.l1_weighted == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-8));
}

TEST_CASE("flux plus weighted mass reproduces the direct quadrature") {
    GridPtr g = default_grid();
    Params P{3, 2.0, 0.0, 1.0};
    RadialFn w0 = dirac_potential(P, g);
    MassReport a = gradient_mass(w0, P);
    CHECK(a.boundary_flux_term + a.l1_weighted == doctest::Approx(a.grad_mass).epsilon(1e-6));

    PotentialPair pots = potential_pair(P, g);
    MassReport b = gradient_mass(pots.w1, P);
    CHECK(b.grad_mass == doctest::Approx(1.0 / (16.0 * kPi)).epsilon(1e-7));
    CHECK(b.boundary_flux_term + b.l1_weighted == doctest::Approx(b.grad_mass).epsilon(1e-8));
}

TEST_CASE("gradient mass is 1-homogeneous in the profile") {
    GridPtr g = default_grid();
    Params P{3, 2.0, 0.0, 1.0};
    RadialFn w0 = dirac_potential(P, g);
    const double base = gradient_mass(w0, P).grad_mass;
    for (double lam : {0.5, 2.0}) {
        RadialFn scaled = axpy(lam, w0, 0.0, w0);
        const double got = gradient_mass(scaled, P).grad_mass;
        CHECK(std::abs(got - lam * base) <= 1e-6 * lam * base);
    }
}

TEST_CASE("gradient mass guards its hypotheses") {
    GridPtr g = make_grid(1e-4, 128);
    Params P{3, 2.0, 0.0, 1.0};

    std::vector<double> rising(g->size());
    for (int i = 0; i < g->size(); ++i) rising[i] = g->nodes[i] - 1.0;
    CHECK_THROWS_AS(gradient_mass(RadialFn(g, rising), P), MonotonicityError);

    std::vector<double> lifted(g->size());
    for (int i = 0; i < g->size(); ++i) lifted[i] = 2.0 - g->nodes[i];
    CHECK_THROWS_AS(gradient_mass(RadialFn(g, lifted), P), DomainError);

    // head too singular for a finite flux limit: u ~ r^{1-N} with no log damping
    std::vector<double> v(g->size());
    for (int i = 0; i < g->size(); ++i) v[i] = std::pow(g->nodes[i], -2.0) - 1.0;
    RadialFn hot(g, v, SingularTag::power(-2.0), 1.0);
    CHECK_THROWS_AS(gradient_mass(hot, P), DivergenceError);
}

TEST_CASE("distributional residual is tight on the exact Dirac potential") {
    GridPtr g = default_grid();
    for (int N : {2, 3}) {
        Params P{N, 2.0, 0.0, 1.0};
        RadialFn w0 = dirac_potential(P, g);
        // pure -Δu = k δ0 against both polynomial test functions
        CHECK(weak_residual(w0, P, 1.0, 0.0) <= 1e-6);
        RadialFn scaled = axpy(2.5, w0, 0.0, w0);
        Params Pk = P;
        Pk.k = 2.5;
        CHECK(weak_residual(scaled, Pk, 1.0, 0.0) <= 3e-6);
    }
}

TEST_CASE("distributional residual rejects non-integrable nonlinearities") {
    GridPtr g = make_grid(1e-4, 128);
    Params P{3, 3.5, 0.0, 1.0};
    std::vector<double> v(g->size());
    for (int i = 0; i < g->size(); ++i) v[i] = std::pow(g->nodes[i], -1.0) - 1.0;
    RadialFn u(g, v, SingularTag::power(-1.0), 1.0);
    // u^p ~ r^{-3.5} against r^2 dr diverges
    CHECK_THROWS_AS(weak_residual(u, P, 1.0, 1.0), DivergenceError);
    CHECK_THROWS_AS(weak_residual(u, P, 0.0, 1.0), DomainError);
}
