#include "ksing/criteria.hpp"

#include <algorithm>
#include <cmath>

#include "ksing/green.hpp"

namespace ksing {

double compute_ap(const Params& P, const GridPtr& g) {
    P.validate();
    if (!(P.p < P.p_star())) throw DomainError("a_p is defined for subcritical p only");
    const PotentialPair pair = potential_pair(P, g);
    const int n = g->size();
    double best = 0.0;
    for (int i = 0; i < n - 1; ++i)  // last node is 0/0
        best = std::max(best, pair.w1.values[i] / pair.w0.values[i]);
    // boundary limit by the one-sided second-order derivative ratio (the
    // steps and chain-rule factors cancel)
    const auto& w0 = pair.w0.values;
    const auto& w1 = pair.w1.values;
    const double d0 = 3.0 * w0[n - 1] - 4.0 * w0[n - 2] + w0[n - 3];
    const double d1 = 3.0 * w1[n - 1] - 4.0 * w1[n - 2] + w1[n - 3];
    if (d0 != 0.0) best = std::max(best, d1 / d0);
    return best;
}

namespace {

double h_val(const Params& P, double k) { return std::pow(k, P.p - 1.0) / (P.theta + k); }

double h_deriv(const Params& P, double k) {
    const double den = P.theta + k;
    return std::pow(k, P.p - 2.0) * ((P.p - 1.0) * P.theta + (P.p - 2.0) * k) / (den * den);
}

// root of h = rhs in [a, b]; h(a) and h(b) must straddle rhs
double solve_h(const Params& P, double rhs, double a, double b) {
    double fa = h_val(P, a) - rhs;
    for (int it = 0; it < 200; ++it) {
        if (b - a <= 1e-16 * std::max(1.0, std::abs(b))) break;
        const double mid = 0.5 * (a + b);
        const double fm = h_val(P, mid) - rhs;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    double k = 0.5 * (a + b);
    for (int it = 0; it < 4; ++it) {
        const double d = h_deriv(P, k);
        if (d == 0.0) break;
        const double knew = k - (h_val(P, k) - rhs) / d;
        if (knew > 0.0 && P.theta + knew > 0.0)
            k = knew;
        else
            break;
    }
    return k;
}

// smallest k > from with sign(h - rhs) == want_pos, found by doubling
double expand_up(const Params& P, double rhs, double from, bool want_pos) {
    double k = from;
    for (int i = 0; i < 4000; ++i) {
        if ((h_val(P, k) - rhs > 0.0) == want_pos) return k;
        k *= 2.0;
    }
    throw DomainError("failed to bracket the condition threshold from above");
}

// k in (lo_excl, upto) close enough to lo_excl that sign(h - rhs) == want_pos
double shrink_down(const Params& P, double rhs, double lo_excl, double upto, bool want_pos) {
    double eps = 0.25 * (upto - lo_excl);
    for (int i = 0; i < 400; ++i) {
        const double k = lo_excl + eps;
        if ((h_val(P, k) - rhs > 0.0) == want_pos) return k;
        eps *= 1e-3;
    }
    throw DomainError("failed to bracket the condition threshold from below");
}

// same but shrinking a plain positive k toward 0
double shrink_to_zero(const Params& P, double rhs, double from, bool want_pos) {
    double k = from;
    for (int i = 0; i < 400; ++i) {
        if ((h_val(P, k) - rhs > 0.0) == want_pos) return k;
        k *= 1e-3;
    }
    throw DomainError("failed to bracket the condition threshold near zero");
}

}  // namespace

ConditionReport check_condition(const Params& P, double a_p) {
    P.validate();
    if (!(a_p > 0.0)) throw DomainError("a_p must be positive");
    if (!(P.k > P.theta_minus())) throw DomainError("condition needs k > min(0, theta)");

    ConditionReport R;
    R.a_p = a_p;
    R.rhs = 1.0 / (a_p * P.p) * std::pow((P.p - 1.0) / P.p, P.p - 1.0);
    R.lhs_at_k =
        (P.theta + P.k == 0.0) ? std::numeric_limits<double>::infinity() : h_val(P, P.k);
    R.admissible = P.k > 0.0 && P.theta + P.k > 0.0 &&
                   std::pow(P.k, P.p - 1.0) <= R.rhs * (P.theta + P.k);

    const double p = P.p, th = P.theta, rhs = R.rhs;
    const double inf = std::numeric_limits<double>::infinity();
    if (p != 2.0) {
        const double k0 = (p - 1.0) * th / (2.0 - p);
        if (k0 > 0.0 && th + k0 > 0.0) R.k0 = k0;
    }

    if (th > 0.0) {
        if (p < 2.0) {
            // h rises to a hump at k0 and decays back to 0
            R.case_label = "theta>0, 1<p<2";
            R.threshold_derived =
                std::pow(th, 2.0 - p) * std::pow(p, -p) * std::pow(2.0 - p, p - 2.0);
            const double k0 = *R.k0;
            if (h_val(P, k0) <= rhs) {
                R.admissible_set.push_back({0.0, inf});
            } else {
                const double a = shrink_to_zero(P, rhs, k0, false);
                const double b = expand_up(P, rhs, 2.0 * k0, false);
                R.admissible_set.push_back({0.0, solve_h(P, rhs, a, k0)});
                R.admissible_set.push_back({solve_h(P, rhs, k0, b), inf});
            }
        } else if (p == 2.0) {
            R.case_label = "theta>0, p=2";
            if (rhs >= 1.0)
                R.admissible_set.push_back({0.0, inf});
            else
                R.admissible_set.push_back({0.0, rhs * th / (1.0 - rhs)});
        } else {
            R.case_label = "theta>0, p>2";
            const double b = expand_up(P, rhs, 1.0, true);
            const double a = shrink_to_zero(P, rhs, 0.5 * b, false);
            R.admissible_set.push_back({0.0, solve_h(P, rhs, a, b)});
        }
    } else if (th == 0.0) {
        if (p < 2.0) {
            R.case_label = "theta=0, 1<p<2";
            R.admissible_set.push_back({std::pow(rhs, 1.0 / (p - 2.0)), inf});
        } else if (p == 2.0) {
            R.case_label = "theta=0, p=2";
            R.threshold_derived = 0.25;
            if (rhs >= 1.0) R.admissible_set.push_back({0.0, inf});
        } else {
            R.case_label = "theta=0, p>2";
            R.admissible_set.push_back({0.0, std::pow(rhs, 1.0 / (p - 2.0))});
        }
    } else {
        const double dlo = -th;  // h blows up at the domain edge theta + k = 0
        if (p < 2.0) {
            R.case_label = "theta<0, 1<p<2";
            const double a = shrink_down(P, rhs, dlo, dlo + std::max(1.0, dlo), true);
            const double b = expand_up(P, rhs, 2.0 * dlo, false);
            R.admissible_set.push_back({solve_h(P, rhs, a, b), inf});
        } else if (p == 2.0) {
            R.case_label = "theta<0, p=2";
            R.threshold_derived = 0.25;  // nonempty exactly when a_p < 1/4
            if (rhs > 1.0) R.admissible_set.push_back({rhs * (-th) / (rhs - 1.0), inf});
        } else {
            // h falls from +inf to a dip at k0, then climbs to +inf
            R.case_label = "theta<0, 2<p";
            R.threshold_derived =
                std::pow(-th, 2.0 - p) * std::pow(p, -p) * std::pow(p - 2.0, p - 2.0);
            R.threshold_stated = std::pow(-th, 2.0 - p) * std::pow(p, -p) * (p - 1.0) *
                                 std::pow(p - 2.0, p - 3.0);
            R.threshold_unverified = true;
            const double k0 = *R.k0;
            if (h_val(P, k0) <= rhs) {
                const double a = shrink_down(P, rhs, dlo, k0, true);
                const double b = expand_up(P, rhs, 2.0 * k0, true);
                R.admissible_set.push_back(
                    {solve_h(P, rhs, a, k0), solve_h(P, rhs, k0, b)});
            }
        }
    }
    return R;
}

BarrierScale barrier_scale(const Params& P) {
    P.validate();
    if (!(P.theta + P.k > 0.0)) throw DomainError("barrier scale needs theta + k > 0");
    BarrierScale b;
    b.s_p = std::pow(P.p / (P.p - 1.0), P.p);
    b.t_p = b.s_p / (P.theta + P.k);
    return b;
}

double singularity_coeff(const Params& P, CoeffRegime regime) {
    P.validate();
    const double g = 2.0 / (P.p - 1.0);
    switch (regime) {
        case CoeffRegime::absorption_subcritical: {
            const double b = g * (g + 2.0 - P.N);
            if (!(b > 0.0))
                throw DomainError("absorption coefficient needs subcritical p");
            return std::pow(b, 1.0 / (P.p - 1.0));
        }
        case CoeffRegime::source_supercritical: {
            const double b = g * (P.N - 2.0 - g);
            if (!(b > 0.0))
                throw DomainError("source coefficient needs supercritical p");
            return std::pow(b, 1.0 / (P.p - 1.0));
        }
        case CoeffRegime::source_critical: {
            if (P.N < 3 || std::abs(P.p - P.p_star()) > 1e-12)
                throw DomainError("critical coefficient needs p = p_star");
            return std::pow((P.N - 2.0) / 4.0, double(P.N - 2));
        }
    }
    throw DomainError("unknown coefficient regime");
}

BootstrapLedger bootstrap_ledger(const Params& P) {
    P.validate();
    if (P.N < 3) throw DomainError("bootstrap ledger needs N >= 3");
    if (!(P.p < P.p_star())) throw DomainError("bootstrap ledger needs subcritical p");

    BootstrapLedger L;
    const double target = 0.5 * P.N * P.p;
    const double guard = 0.5 * P.N;
    L.t_seq.push_back(0.5 * (1.0 + P.N / ((P.N - 2.0) * P.p)));
    for (int m = 0; m < 64; ++m) {
        const double t = L.t_seq.back();
        if (t > target) {
            L.m0 = m;
            break;
        }
        if (t >= guard) break;  // next step would leave the valid range
        L.t_seq.push_back(P.N * t / (P.p * (P.N - 2.0 * t)));
    }

    L.mu_seq.push_back(2.0 + (2.0 - P.N) * P.p);
    for (int n = 1; n <= 64; ++n) {
        if (L.mu_seq.back() > 0.0) {
            L.n2 = n;
            break;
        }
        L.mu_seq.push_back(L.mu_seq.back() * P.p + 2.0);
    }
    return L;
}

}  // namespace ksing
