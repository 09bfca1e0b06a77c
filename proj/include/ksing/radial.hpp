#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "ksing/errors.hpp"

namespace ksing {

// Geometric (log-uniform) node set on (0, 1]: nodes[i] = r_min^(1 - i/(n-1)),
// uniform in t = ln r.  Singular profiles vary over decades in r; a uniform
// grid cannot resolve them.
struct RadialGrid {
    double r_min = 0.0;
    std::vector<double> nodes;
    double log_step = 0.0;  // spacing in t = ln r

    // Relaxed constructor (n_nodes >= 2) for small hand-checked grids.
    static RadialGrid geometric(double r_min, int n_nodes);

    int size() const { return static_cast<int>(nodes.size()); }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// Contract form: 0 < r_min < 1, n_nodes >= 16, else DomainError.
GridPtr make_grid(double r_min, int n_nodes);
GridPtr default_grid();

inline constexpr double kDefaultRMin = 1e-6;
inline constexpr int kDefaultNodes = 4096;

enum class TagKind { none, power, log_type };

// Behavior below the first node: u(r) ~ coeff * r^alpha * (-ln r)^log_pow.
// `power` keeps log_pow = 0; `log_type` allows any log power (alpha may be 0,
// so the plain -ln r case is (0, 1)).  Everything singular in this problem
// class is an exact power times a log power near the origin, so integrals
// over (0, r_min) close in terms of the upper incomplete gamma function.
struct SingularTag {
    TagKind kind = TagKind::none;
    double alpha = 0.0;
    double log_pow = 0.0;

    static SingularTag none_tag() { return {}; }
    static SingularTag power(double a) { return {TagKind::power, a, 0.0}; }
    static SingularTag log_at_origin() { return {TagKind::log_type, 0.0, 1.0}; }
    static SingularTag power_log(double a, double q) { return {TagKind::log_type, a, q}; }

    bool is_none() const { return kind == TagKind::none; }
};

struct RadialFn {
    GridPtr grid;
    std::vector<double> values;
    SingularTag tag;
    double singular_coeff = 0.0;

    RadialFn() = default;
    RadialFn(GridPtr g, std::vector<double> v, SingularTag t = SingularTag::none_tag(),
             double coeff = 0.0);

    int size() const { return static_cast<int>(values.size()); }
    double sup_abs() const;
};

struct Params {
    int N = 3;
    double p = 2.0;
    double theta = 0.0;
    double k = 1.0;

    double p_star() const;      // N/(N-2), +inf for N = 2
    double theta_minus() const; // min(0, theta)
    double sigma_N() const;     // measure of the unit sphere S^{N-1}
    double c_N() const;         // fundamental-solution normalization on the ball
    void validate() const;      // N >= 2, p > 1
};

// --- quadrature and differentiation on the uniform t-grid -------------------
//
// All rules are 4th order: the interior interval weight is
// (h/24)(-g_{i-1} + 13 g_i + 13 g_{i+1} - g_{i+2}), with one-sided first/last
// intervals.  Samples f are values of the integrand *including* any Jacobian.

double integrate_t(const RadialGrid& g, const std::vector<double>& f);
// c[0] = 0, c[i] = integral of f dt over [t_0, t_i]
std::vector<double> cumulative_from_start_t(const RadialGrid& g, const std::vector<double>& f);
// b[i] = integral of f dt over [t_i, t_{n-1}], b[n-1] = 0
std::vector<double> cumulative_to_end_t(const RadialGrid& g, const std::vector<double>& f);
// FD4 d/dt with one-sided 5-point stencils at the two edge nodes per side
std::vector<double> derivative_t(const RadialGrid& g, const std::vector<double>& f);

// Upper incomplete gamma for any real order: tgamma(a, x) for a > 0,
// E1(x) for a = 0, downward recurrence for a < 0.
double upper_gamma(double a, double x);

// Closed form of  c * integral_0^a r^m (-ln r)^q dr,  0 < a <= 1.
// Converges for m > -1, or m = -1 with q < -1; otherwise throws
// DivergenceError.
double head_power_log(double c, double m, double q, double a);

// Volume integral sigma_N * integral_0^1 |u| r^{N-1} dr, tag part in closed
// form on (0, r_min); an untagged u is extended by its first value.
double l1_norm(const RadialFn& u, int N);

// max_i (u[i+1] - u[i]) as a cheap monotonicity probe (negative if strictly
// decreasing everywhere).
double max_increase(const RadialFn& u);

}  // namespace ksing
