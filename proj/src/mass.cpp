#include "ksing/mass.hpp"

#include <algorithm>
#include <cmath>

#include "ksing/green.hpp"

namespace ksing {

namespace {

// sigma_N * lim_{r->0} u r^{N-1} from the tag; throws if the limit blows up
double flux_limit(const RadialFn& u, const Params& P) {
    if (u.tag.is_none()) return 0.0;  // bounded near 0, N >= 2 kills it
    const double m = u.tag.alpha + P.N - 1.0, q = u.tag.log_pow;
    if (m > 0.0) return 0.0;
    if (m == 0.0) {
        if (q == 0.0) return P.sigma_N() * u.singular_coeff;
        if (q < 0.0) return 0.0;
        throw DivergenceError("flux limit diverges: log factor at the borderline power");
    }
    throw DivergenceError("flux limit diverges at the origin");
}

}  // namespace

MassReport gradient_mass(const RadialFn& u, const Params& P) {
    P.validate();
    const RadialGrid& g = *u.grid;
    const int n = g.size();
    const double sup = u.sup_abs();
    if (std::abs(u.values.back()) > 1e-9 * std::max(sup, 1.0))
        throw DomainError("gradient mass needs u(1) = 0");
    if (max_increase(u) > 1e-9 * std::max(sup, 1.0))
        throw MonotonicityError("gradient mass needs a nonincreasing profile");

    MassReport rep;
    rep.boundary_flux_term = flux_limit(u, P);

    // head of ∫ (-u') r^{N-1} dr from the tag: with u ~ c r^a (-ln r)^q,
    //   -u' r^{N-1} = c r^{a+N-2} (-ln r)^{q-1} (q - a(-ln r))
    double head_grad = 0.0;
    double head_l1w = 0.0;
    if (!u.tag.is_none()) {
        const double c = u.singular_coeff, a = u.tag.alpha, q = u.tag.log_pow;
        if (a != 0.0)
            head_grad -= head_power_log(c * a, a + P.N - 2.0, q, g.r_min);
        if (q != 0.0)
            head_grad += head_power_log(c * q, a + P.N - 2.0, q - 1.0, g.r_min);
        head_l1w = head_power_log(c, a + P.N - 2.0, q, g.r_min);
    } else {
        head_l1w = u.values.front() * std::pow(g.r_min, P.N - 1.0) / (P.N - 1.0);
    }

    std::vector<double> du = derivative_t(g, u.values);
    std::vector<double> f_grad(n), f_l1w(n);
    for (int i = 0; i < n; ++i) {
        const double rpow = std::pow(g.nodes[i], P.N - 1.0);
        f_grad[i] = -du[i] * rpow;          // (-u') r^{N-1} dr = (-du/dt) r^{N-1} dt
        f_l1w[i] = u.values[i] * rpow;      // u r^{N-2} dr = u r^{N-1} dt
    }
    const double sn = P.sigma_N();
    rep.grad_mass = sn * (head_grad + integrate_t(g, f_grad));
    rep.l1_weighted = (P.N - 1.0) * sn * (head_l1w + integrate_t(g, f_l1w));
    rep.m_theta = P.theta + rep.grad_mass;
    return rep;
}

double weak_residual(const RadialFn& u, const Params& P, double m_theta,
                     double p_term_weight) {
    P.validate();
    if (m_theta == 0.0) throw DomainError("weak residual undefined at m_theta = 0");
    const RadialGrid& g = *u.grid;
    const int n = g.size();

    RadialFn up = pow_fn(u, P.p);
    // integrability of the nonlinear term near 0
    if (!up.tag.is_none() && p_term_weight != 0.0) {
        const double m = up.tag.alpha + P.N - 1.0;
        if (m < -1.0 || (m == -1.0 && up.tag.log_pow >= -1.0))
            throw DivergenceError("nonlinear term not integrable near the origin");
    }

    double worst = 0.0;
    for (int j = 1; j <= 2; ++j) {
        // xi_j = (1 - r^2)^j: -Δxi_1 = 2N, -Δxi_2 = 4N - (4N+8) r^2
        auto xi = [&](double r) { return std::pow(1.0 - r * r, double(j)); };
        auto neg_lap = [&](double r) {
            return j == 1 ? 2.0 * P.N : 4.0 * P.N - (4.0 * P.N + 8.0) * r * r;
        };

        std::vector<double> f1(n), f2(n);
        for (int i = 0; i < n; ++i) {
            const double r = g.nodes[i];
            const double vol = std::pow(r, double(P.N));  // r^{N-1} dr = r^N dt
            f1[i] = u.values[i] * neg_lap(r) * vol;
            f2[i] = up.values[i] * xi(r) * vol;
        }
        // heads: both xi_j and -Δxi_j are smooth with xi_j(0) = 1, so the
        // sub-r_min parts use their values at 0 (relative error O(r_min^2))
        double head1 = 0.0, head2 = 0.0;
        if (!u.tag.is_none())
            head1 = neg_lap(0.0) *
                    head_power_log(u.singular_coeff, u.tag.alpha + P.N - 1, u.tag.log_pow,
                                   g.r_min);
        else
            head1 = neg_lap(0.0) * u.values.front() * std::pow(g.r_min, double(P.N)) / P.N;
        if (!up.tag.is_none())
            head2 = head_power_log(up.singular_coeff, up.tag.alpha + P.N - 1, up.tag.log_pow,
                                   g.r_min);
        else
            head2 = up.values.front() * std::pow(g.r_min, double(P.N)) / P.N;

        const double sn = P.sigma_N();
        const double term1 = sn * (head1 + integrate_t(g, f1));
        const double term2 = sn * (head2 + integrate_t(g, f2));
        worst = std::max(worst, std::abs(term1 - (p_term_weight / m_theta) * term2 - P.k));
    }
    return worst;
}

}  // namespace ksing
