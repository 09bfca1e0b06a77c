#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ksing/radial.hpp"

namespace ksing {

// Sharp comparison constant a_p = sup_(0,1) w1/w0.  The ratio is 0/0 at
// r = 1; there it is evaluated as the one-sided derivative ratio
// w1'(1)/w0'(1), which is also where the sup sits when the ratio increases
// toward the boundary.  Requires 1 < p < p_star.
double compute_ap(const Params& P, const GridPtr& g);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;  // +inf allowed
};

// Report on the smallness condition k^{p-1}/(theta+k) <= rhs with
// rhs = (1/(a_p p))((p-1)/p)^{p-1}, including the full admissible set in k
// (pieces of {k : theta+k > 0, k^{p-1} <= rhs (theta+k)}) and the case
// classification by the signs of theta and p-2.  The h(k) analysis only makes
// sense where theta+k > 0; the admissible flag uses that product form.
struct ConditionReport {
    double a_p = 0.0;
    double rhs = 0.0;
    double lhs_at_k = 0.0;
    bool admissible = false;
    std::vector<Interval> admissible_set;
    std::optional<double> k0;  // stationary point (p-1) theta / (2-p), p != 2
    std::string case_label;
    // threshold on a_p separating "holds for all k in the domain" from "not";
    // the stated closed form for theta<0, p>2 does not re-derive, so it is
    // reported alongside the derived one and flagged.
    std::optional<double> threshold_stated;
    std::optional<double> threshold_derived;
    bool threshold_unverified = false;
};

ConditionReport check_condition(const Params& P, double a_p);

// Barrier scales: s_p = (p/(p-1))^p is the tangency point of
// f(s) = ((1/p)((p-1)/p)^{p-1} s + 1)^p with the diagonal, t_p = s_p/(theta+k).
struct BarrierScale {
    double s_p = 0.0;
    double t_p = 0.0;
};

BarrierScale barrier_scale(const Params& P);

enum class CoeffRegime { absorption_subcritical, source_supercritical, source_critical };

// Leading coefficient of the strong singularity u ~ c_p r^{-2/(p-1)}:
//   absorption: [g (g+2-N)]^{1/(p-1)},   source: [g (N-2-g)]^{1/(p-1)},
// g = 2/(p-1); the critical case returns the stated ((N-2)/4)^{N-2}.
double singularity_coeff(const Params& P, CoeffRegime regime);

// Integrability-exponent recursions: t_m = (1/p) N t_{m-1} / (N - 2 t_{m-1})
// from t_0 = (1 + N/((N-2)p))/2 until t_m > Np/2 (index m0; -1 if the
// recursion leaves its validity range t < N/2 first), and mu_n = mu_{n-1} p + 2
// from mu_1 = 2 + (2-N)p until positive (subscript n2).
struct BootstrapLedger {
    std::vector<double> t_seq;
    std::vector<double> mu_seq;
    int m0 = -1;
    int n2 = -1;
};

BootstrapLedger bootstrap_ledger(const Params& P);

}  // namespace ksing
