#include <cmath>
#include <vector>

#include "doctest.h"
#include "ksing/criteria.hpp"
#include "ksing/green.hpp"
#include "ksing/radial.hpp"

using namespace ksing;

namespace {
const double kPi = 3.14159265358979323846;

double h_of(double k, double p, double theta) {
    return std::pow(k, p - 1.0) / (theta + k);
}

// membership in the reported admissible set, skipping a slack band around
// every finite endpoint where the two routes may disagree by rounding
bool in_set(const std::vector<Interval>& set, double k, double slack) {
    for (const Interval& iv : set) {
        if (std::abs(k - iv.lo) <= slack) return true;  // ambiguous, caller skips
        if (std::isfinite(iv.hi) && std::abs(k - iv.hi) <= slack) return true;
        if (k >= iv.lo && k <= iv.hi) return true;
    }
    return false;
}

bool near_edge(const std::vector<Interval>& set, double k, double slack) {
    for (const Interval& iv : set) {
        if (std::abs(k - iv.lo) <= slack) return true;
        if (std::isfinite(iv.hi) && std::abs(k - iv.hi) <= slack) return true;
    }
    return false;
}
}  // namespace

TEST_CASE("comparison constant a_2 in two and three dimensions") {
    GridPtr g = default_grid();
    Params P3{3, 2.0, 0.0, 1.0};
    const double a3 = compute_ap(P3, g);
    CHECK(std::abs(a3 - 1.0 / (12.0 * kPi)) <= 1e-4 / (12.0 * kPi));
    CHECK(a3 < 0.25);

    Params P2{2, 2.0, 0.0, 1.0};
    const double a2 = compute_ap(P2, g);
    CHECK(std::abs(a2 - 1.0 / (8.0 * kPi)) <= 1e-4 / (8.0 * kPi));
    CHECK(a2 < 0.25);

    CHECK_THROWS_AS(compute_ap(Params{3, 3.0, 0.0, 1.0}, g), DomainError);
    CHECK_THROWS_AS(compute_ap(Params{3, 4.0, 0.0, 1.0}, g), DomainError);
}

TEST_CASE("admissible set matches the raw inequality across all sign cases") {
    struct Case {
        double theta, p, a_p, lo, hi;
        const char* label;
    };
    // a_p chosen per case so that both empty-ish and roomy sets appear
    const Case cases[] = {
        {1.0, 1.5, 0.05, 1e-3, 50.0, "theta>0, 1<p<2"},
        {1.0, 1.5, 5.0, 1e-3, 50.0, "theta>0, 1<p<2"},
        {1.0, 2.0, 0.05, 1e-3, 50.0, "theta>0, p=2"},
        {1.0, 2.0, 5.0, 1e-3, 50.0, "theta>0, p=2"},
        {1.0, 3.0, 0.05, 1e-3, 50.0, "theta>0, p>2"},
        {0.0, 1.5, 0.05, 1e-3, 50.0, "theta=0, 1<p<2"},
        {0.0, 2.0, 0.05, 1e-3, 50.0, "theta=0, p=2"},
        {0.0, 2.0, 5.0, 1e-3, 50.0, "theta=0, p=2"},
        {0.0, 3.0, 0.05, 1e-3, 50.0, "theta=0, p>2"},
        {-1.0, 1.5, 0.05, 1.0 + 1e-6, 50.0, "theta<0, 1<p<2"},
        {-1.0, 2.0, 0.2, 1.0 + 1e-6, 50.0, "theta<0, p=2"},
        {-1.0, 2.0, 5.0, 1.0 + 1e-6, 50.0, "theta<0, p=2"},
        {-1.0, 3.0, 0.01, 1.0 + 1e-6, 50.0, "theta<0, 2<p"},
        {-1.0, 3.0, 5.0, 1.0 + 1e-6, 50.0, "theta<0, 2<p"},
    };
    for (const Case& c : cases) {
        CAPTURE(c.theta);
        CAPTURE(c.p);
        CAPTURE(c.a_p);
        Params P{3, c.p, c.theta, 1.0};
        P.k = std::max(c.lo, 0.5);
        ConditionReport base = check_condition(P, c.a_p);
        CHECK(base.case_label == c.label);
        const double rhs = base.rhs;

        // deterministic low-discrepancy sample over [lo, hi]
        double frac = 0.0;
        for (int j = 0; j < 200; ++j) {
            frac += 0.6180339887498949;
            frac -= std::floor(frac);
            const double k = c.lo + (c.hi - c.lo) * frac;
            const double slack = 1e-6 * std::max(1.0, k);
            if (near_edge(base.admissible_set, k, slack)) continue;
            const bool direct = h_of(k, c.p, c.theta) <= rhs;
            CHECK(in_set(base.admissible_set, k, 0.0) == direct);

            Params Q = P;
            Q.k = k;
            ConditionReport at = check_condition(Q, c.a_p);
            CHECK(at.admissible == direct);
        }

        // every finite interior endpoint sits on the level set h = rhs
        for (const Interval& iv : base.admissible_set) {
            if (iv.lo > 0.0 && std::isfinite(iv.lo))
                CHECK(h_of(iv.lo, c.p, c.theta) == doctest::Approx(rhs).epsilon(1e-9));
            if (std::isfinite(iv.hi) && iv.hi > 0.0)
                CHECK(h_of(iv.hi, c.p, c.theta) == doctest::Approx(rhs).epsilon(1e-9));
        }
    }
}

TEST_CASE("stationary point and thresholds of the condition") {
    Params P{3, 1.5, 1.0, 1.0};
    ConditionReport hump = check_condition(P, 0.05);
    REQUIRE(hump.k0.has_value());
    CHECK(*hump.k0 == doctest::Approx(1.0).epsilon(1e-14));  // (p-1)θ/(2-p)
    REQUIRE(hump.threshold_derived.has_value());
    CHECK(*hump.threshold_derived ==
          doctest::Approx(std::pow(1.5, -1.5) * std::pow(0.5, -0.5)).epsilon(1e-13));
    CHECK_FALSE(hump.threshold_unverified);

    Params Q{3, 2.0, -1.0, 2.0};
    ConditionReport flat = check_condition(Q, 0.2);
    CHECK_FALSE(flat.k0.has_value());
    REQUIRE(flat.threshold_derived.has_value());
    CHECK(*flat.threshold_derived == 0.25);
    // a_p = 0.2 < 1/4: one ray, foot exactly on the level set
    REQUIRE(flat.admissible_set.size() == 1);
    CHECK(flat.admissible_set[0].lo == doctest::Approx(5.0).epsilon(1e-12));

    Params R{3, 3.0, -1.0, 2.0};
    ConditionReport dip = check_condition(R, 0.01);
    REQUIRE(dip.threshold_derived.has_value());
    REQUIRE(dip.threshold_stated.has_value());
    CHECK(*dip.threshold_derived == doctest::Approx(1.0 / 27.0).epsilon(1e-13));
    CHECK(*dip.threshold_stated == doctest::Approx(2.0 / 27.0).epsilon(1e-13));
    CHECK(dip.threshold_unverified);
    // the two closed forms genuinely disagree, which is why the flag exists
    CHECK(*dip.threshold_stated != *dip.threshold_derived);

    CHECK_THROWS_AS(check_condition(Params{3, 2.0, 0.0, 0.0}, 0.05), DomainError);
    CHECK_THROWS_AS(check_condition(Params{3, 2.0, 0.0, 1.0}, -1.0), DomainError);

    // theta + k < 0 is reportable, just never admissible
    ConditionReport neg = check_condition(Params{3, 2.0, -2.0, 1.0}, 0.05);
    CHECK_FALSE(neg.admissible);
}

TEST_CASE("frozen admissibility boundary for theta = 0, p = 1.5") {
    GridPtr g = default_grid();
    Params P{3, 1.5, 0.0, 1.0};
    const double a_p = compute_ap(P, g);
    ConditionReport rep = check_condition(P, a_p);
    REQUIRE(rep.admissible_set.size() == 1);
    const double kb = rep.admissible_set[0].lo;
    CHECK(kb == doctest::Approx(0.0675).epsilon(0.05));
    CHECK(h_of(kb, P.p, P.theta) == doctest::Approx(rep.rhs).epsilon(1e-10));
    CHECK(std::isinf(rep.admissible_set[0].hi));
}

TEST_CASE("barrier tangency across exponents") {
    for (double p : {1.2, 1.5, 2.0, 3.0, 5.0}) {
        CAPTURE(p);
        const double s_p = std::pow(p / (p - 1.0), p);
        const double slope = (1.0 / p) * std::pow((p - 1.0) / p, p - 1.0);
        const double f_sp = std::pow(slope * s_p + 1.0, p);
        CHECK(std::abs(f_sp - s_p) <= 1e-12 * std::max(1.0, s_p));
    }
    Params P{3, 2.0, 1.0, 1.0};
    BarrierScale sc = barrier_scale(P);
    CHECK(sc.s_p == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(sc.t_p == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(barrier_scale(Params{3, 2.0, -2.0, 1.0}), DomainError);
}

TEST_CASE("iterated potential sits below a_p times the Dirac potential") {
    struct Pair {
        int N;
        double p;
    };
    for (const Pair& c : {Pair{3, 1.5}, Pair{3, 2.0}, Pair{2, 2.0}, Pair{2, 3.0}}) {
        CAPTURE(c.N);
        CAPTURE(c.p);
        Params P{c.N, c.p, 0.0, 1.0};
        GridPtr g = default_grid();
        const double a_p = compute_ap(P, g);
        PotentialPair pots = potential_pair(P, g);
        for (int i = 0; i + 1 < g->size(); i += 13) {
            CHECK(pots.w1.values[i] <=
                  a_p * pots.w0.values[i] * (1.0 + 1e-9) + 1e-15);
        }
    }
}

TEST_CASE("closed-form singularity coefficients") {
    Params A{3, 2.0, 0.0, 1.0};
    CHECK(singularity_coeff(A, CoeffRegime::absorption_subcritical) ==
          doctest::Approx(2.0).epsilon(1e-14));

    Params S{3, 5.0, 0.0, 1.0};
    CHECK(singularity_coeff(S, CoeffRegime::source_supercritical) ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));

    Params C{4, 2.0, 0.0, 1.0};
    CHECK(singularity_coeff(C, CoeffRegime::source_critical) ==
          doctest::Approx(0.25).epsilon(1e-14));

    CHECK_THROWS_AS(singularity_coeff(Params{3, 3.5, 0.0, 1.0},
                                      CoeffRegime::absorption_subcritical),
                    DomainError);
    CHECK_THROWS_AS(singularity_coeff(Params{3, 2.0, 0.0, 1.0},
                                      CoeffRegime::source_supercritical),
                    DomainError);
    CHECK_THROWS_AS(singularity_coeff(Params{4, 2.5, 0.0, 1.0},
                                      CoeffRegime::source_critical),
                    DomainError);
}

TEST_CASE("bootstrap ledgers on pinned parameter sets") {
    BootstrapLedger a = bootstrap_ledger(Params{3, 2.0, 0.0, 1.0});
    REQUIRE(a.t_seq.size() == 2);
    CHECK(a.t_seq[0] == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(a.t_seq[1] == doctest::Approx(3.75).epsilon(1e-14));
    CHECK(a.m0 == 1);
    REQUIRE(a.mu_seq.size() == 2);
    CHECK(a.mu_seq[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(a.mu_seq[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(a.n2 == 2);

    // exponent recursion leaves its validity range before reaching the target
    BootstrapLedger b = bootstrap_ledger(Params{3, 2.5, 0.0, 1.0});
    CHECK(b.m0 == -1);
    REQUIRE(b.t_seq.size() == 2);
    CHECK(b.t_seq[0] == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(b.t_seq[1] == doctest::Approx(1.65).epsilon(1e-14));
    REQUIRE(b.mu_seq.size() == 2);
    CHECK(b.mu_seq[0] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(b.mu_seq[1] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(b.n2 == 2);

    BootstrapLedger c = bootstrap_ledger(Params{4, 1.5, 0.0, 1.0});
    REQUIRE(c.t_seq.size() == 3);
    CHECK(c.t_seq[0] == doctest::Approx(7.0 / 6.0).epsilon(1e-14));
    CHECK(c.t_seq[1] == doctest::Approx(28.0 / 15.0).epsilon(1e-14));
    CHECK(c.t_seq[2] == doctest::Approx(56.0 / 3.0).epsilon(1e-13));
    CHECK(c.m0 == 2);
    CHECK(c.mu_seq[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(c.mu_seq[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(c.n2 == 2);

    CHECK_THROWS_AS(bootstrap_ledger(Params{2, 2.0, 0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(bootstrap_ledger(Params{3, 3.0, 0.0, 1.0}), DomainError);
}
