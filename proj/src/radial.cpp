#include "ksing/radial.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace ksing {

RadialGrid RadialGrid::geometric(double r_min, int n_nodes) {
    if (!(r_min > 0.0) || !(r_min < 1.0))
        throw DomainError("grid r_min must lie in (0, 1)");
    if (n_nodes < 2) throw DomainError("grid needs at least two nodes");
    RadialGrid g;
    g.r_min = r_min;
    g.nodes.resize(n_nodes);
    const double t0 = std::log(r_min);
    g.log_step = -t0 / (n_nodes - 1);
    for (int i = 0; i < n_nodes; ++i) {
        // exp of the exact fraction keeps the node ratio constant to 1 ulp
        g.nodes[i] = std::exp(t0 * (1.0 - double(i) / (n_nodes - 1)));
    }
    g.nodes.front() = r_min;
    g.nodes.back() = 1.0;
    return g;
}

GridPtr make_grid(double r_min, int n_nodes) {
    if (n_nodes < 16) throw DomainError("grid needs at least 16 nodes");
    return std::make_shared<const RadialGrid>(RadialGrid::geometric(r_min, n_nodes));
}

GridPtr default_grid() {
    static const GridPtr g = make_grid(kDefaultRMin, kDefaultNodes);
    return g;
}

RadialFn::RadialFn(GridPtr g, std::vector<double> v, SingularTag t, double coeff)
    : grid(std::move(g)), values(std::move(v)), tag(t), singular_coeff(coeff) {
    if (!grid) throw DomainError("radial function needs a grid");
    if (static_cast<int>(values.size()) != grid->size())
        throw DomainError("value count does not match grid node count");
}

double RadialFn::sup_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double Params::p_star() const {
    if (N == 2) return std::numeric_limits<double>::infinity();
    return double(N) / (N - 2);
}

double Params::theta_minus() const { return std::min(0.0, theta); }

double Params::sigma_N() const {
    return 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
}

double Params::c_N() const {
    if (N == 2) return 1.0 / (2.0 * M_PI);
    return 1.0 / ((N - 2) * sigma_N());
}

void Params::validate() const {
    if (N < 2) throw DomainError("dimension must be at least 2");
    if (!(p > 1.0)) throw DomainError("exponent p must exceed 1");
}

// --- quadrature --------------------------------------------------------------

namespace {

// weight of the interval [t_i, t_{i+1}] against samples; n >= 4
double interval_t(const std::vector<double>& f, int i, double h) {
    const int n = static_cast<int>(f.size());
    if (i == 0) return h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    if (i == n - 2)
        return h / 24.0 * (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4]);
    return h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
}

}  // namespace

std::vector<double> cumulative_from_start_t(const RadialGrid& g, const std::vector<double>& f) {
    const int n = g.size();
    std::vector<double> c(n, 0.0);
    if (n < 4) {  // trapezoid fallback for the tiny hand grids
        for (int i = 1; i < n; ++i) c[i] = c[i - 1] + 0.5 * g.log_step * (f[i - 1] + f[i]);
        return c;
    }
    for (int i = 1; i < n; ++i) c[i] = c[i - 1] + interval_t(f, i - 1, g.log_step);
    return c;
}

std::vector<double> cumulative_to_end_t(const RadialGrid& g, const std::vector<double>& f) {
    std::vector<double> c = cumulative_from_start_t(g, f);
    const double total = c.back();
    for (double& v : c) v = total - v;
    return c;
}

double integrate_t(const RadialGrid& g, const std::vector<double>& f) {
    return cumulative_from_start_t(g, f).back();
}

std::vector<double> derivative_t(const RadialGrid& g, const std::vector<double>& f) {
    const int n = g.size();
    const double h = g.log_step;
    std::vector<double> d(n, 0.0);
    if (n < 5) {
        for (int i = 0; i < n; ++i) {
            if (i == 0)
                d[i] = (f[1] - f[0]) / h;
            else if (i == n - 1)
                d[i] = (f[n - 1] - f[n - 2]) / h;
            else
                d[i] = (f[i + 1] - f[i - 1]) / (2 * h);
        }
        return d;
    }
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12 * h);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12 * h);
    for (int i = 2; i < n - 2; ++i)
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12 * h);
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) /
               (12 * h);
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] +
                3.0 * f[n - 5]) /
               (12 * h);
    return d;
}

// --- singular heads -----------------------------------------------------------

double upper_gamma(double a, double x) {
    if (x < 0.0) throw DomainError("upper incomplete gamma needs x >= 0");
    if (a > 0.0) return boost::math::tgamma(a, x);
    if (a == 0.0) {
        if (x == 0.0) throw DivergenceError("Gamma(0, 0) diverges");
        return boost::math::expint(1, x);
    }
    // climb to nonnegative order: Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a
    if (x == 0.0) throw DivergenceError("Gamma(a, 0) diverges for a <= 0");
    return (upper_gamma(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
}

double head_power_log(double c, double m, double q, double a) {
    if (c == 0.0) return 0.0;
    if (!(a > 0.0) || a > 1.0) throw DomainError("head integral needs 0 < a <= 1");
    if (m == -1.0) {
        // integral r^{-1}(-ln r)^q dr = (-ln a)^{q+1} / |q+1|, q < -1 only
        if (q < -1.0) return c * std::pow(-std::log(a), q + 1.0) / (-(q + 1.0));
        throw DivergenceError("head integral diverges: borderline power with log exponent >= -1");
    }
    if (m < -1.0) throw DivergenceError("head integral diverges: power below -1");
    if (q == 0.0) return c * std::pow(a, m + 1.0) / (m + 1.0);
    const double xa = -(m + 1.0) * std::log(a);  // >= 0
    if (xa == 0.0) {  // a == 1: whole-interval moment, needs q > -1
        if (q <= -1.0) throw DivergenceError("log-moment diverges at the outer endpoint");
        return c * std::pow(m + 1.0, -(q + 1.0)) * std::tgamma(q + 1.0);
    }
    return c * std::pow(m + 1.0, -(q + 1.0)) * upper_gamma(q + 1.0, xa);
}

double l1_norm(const RadialFn& u, int N) {
    const RadialGrid& g = *u.grid;
    double head = 0.0;
    if (u.tag.is_none()) {
        head = std::abs(u.values.front()) * std::pow(g.r_min, N) / N;
    } else {
        head = head_power_log(std::abs(u.singular_coeff), u.tag.alpha + N - 1, u.tag.log_pow,
                              g.r_min);
    }
    std::vector<double> f(g.size());
    for (int i = 0; i < g.size(); ++i)
        f[i] = std::abs(u.values[i]) * std::pow(g.nodes[i], N);  // |u| r^{N-1} * r dt
    const double sn = 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
    return sn * (head + integrate_t(g, f));
}

double max_increase(const RadialFn& u) {
    double m = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < u.values.size(); ++i)
        m = std::max(m, u.values[i + 1] - u.values[i]);
    return m;
}

}  // namespace ksing
