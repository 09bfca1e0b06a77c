#include "ksing/measure_solvers.hpp"

#include <algorithm>
#include <cmath>

#include "ksing/green.hpp"

namespace ksing {

namespace {

// geometric mean of u/Phi over the innermost nodes; Phi = r^{2-N} (N >= 3)
// or -ln r (N = 2)
double fit_singular_coeff(const RadialFn& u, const Params& P, std::string* basis) {
    const RadialGrid& g = *u.grid;
    const int m = std::min(16, g.size() / 4 + 1);
    double acc = 0.0;
    int cnt = 0;
    for (int i = 0; i < m; ++i) {
        const double phi = P.N == 2 ? -std::log(g.nodes[i])
                                    : std::pow(g.nodes[i], 2.0 - P.N);
        const double q = u.values[i] / phi;
        if (q > 0.0) {
            acc += std::log(q);
            ++cnt;
        }
    }
    if (basis) *basis = P.N == 2 ? "-ln r" : "r^(2-N)";
    return cnt ? std::exp(acc / cnt) : 0.0;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

SolveReport weak_singularity_solve(const Params& P, const GridPtr& g, double tol,
                                   int max_iter, bool start_at_barrier_top) {
    P.validate();
    if (!(P.p < P.p_star())) throw DomainError("fixed-point solve needs subcritical p");
    if (!(P.k > P.theta_minus())) throw DomainError("needs k > min(0, theta)");
    if (!(P.theta + P.k > 0.0)) throw DomainError("needs theta + k > 0");
    const double a_p = compute_ap(P, g);
    if (!check_condition(P, a_p).admissible)
        throw DomainError("smallness condition fails at these parameters");

    const PotentialPair pair = potential_pair(P, g);
    const BarrierScale bs = barrier_scale(P);
    const double barrier_amp = bs.t_p * std::pow(P.k, P.p);
    RadialFn barrier = axpy(barrier_amp, pair.w1, 0.0, pair.w1);
    RadialFn kw0 = axpy(P.k, pair.w0, 0.0, pair.w0);

    RadialFn v = start_at_barrier_top ? barrier
                                      : RadialFn(g, std::vector<double>(g->size(), 0.0));
    const double escape_tol = 1e-9 * std::max(1.0, barrier.sup_abs());

    std::vector<double> history;
    SolveReport rep;
    double m_theta = 0.0;
    bool converged = false;
    for (int it = 1; it <= max_iter; ++it) {
        RadialFn u = axpy(1.0, v, 1.0, kw0);
        m_theta = gradient_mass(u, P).m_theta;
        RadialFn gup = green_apply(pow_fn(u, P.p), P);
        RadialFn vn = axpy(1.0 / m_theta, gup, 0.0, gup);
        for (double& x : vn.values) x = std::max(x, 0.0);

        for (int i = 0; i < g->size(); ++i) {
            if (vn.values[i] < -escape_tol || vn.values[i] > barrier.values[i] + escape_tol)
                throw BarrierEscapeError("iterate left the invariant order interval");
        }

        const double res = sup_diff(vn.values, v.values) / std::max(vn.sup_abs(), 1e-30);
        history.push_back(res);
        // damp if the residual stopped contracting
        if (history.size() >= 2 && res > history[history.size() - 2]) {
            for (int i = 0; i < g->size(); ++i)
                vn.values[i] = 0.5 * (vn.values[i] + v.values[i]);
        }
        v = vn;
        rep.iterations = it;
        if (res <= tol) {
            rep.fixed_point_residual = res;
            converged = true;
            break;
        }
    }
    if (!converged)
        throw ConvergenceError("fixed-point iteration did not reach tolerance", history);

    rep.v_part = v;
    rep.profile = axpy(1.0, v, 1.0, kw0);
    RadialFn u = rep.profile;
    rep.m_theta = gradient_mass(u, P).m_theta;
    rep.weak_residual = weak_residual(u, P, rep.m_theta);
    rep.singular_coeff_measured = fit_singular_coeff(u, P, &rep.fit_basis);
    rep.barrier_ok = true;
    for (int i = 0; i < g->size(); ++i) {
        if (v.values[i] < -escape_tol || v.values[i] > barrier.values[i] + escape_tol)
            rep.barrier_ok = false;
    }
    return rep;
}

SolveReport absorption_solve(const Params& P, double lambda, const GridPtr& g, double tol,
                             int max_iter) {
    P.validate();
    if (lambda < 0.0) throw DomainError("absorption weight must be nonnegative");
    if (!(P.p < P.p_star())) throw DomainError("absorption solve needs subcritical p");
    if (!(P.k > 0.0)) throw DomainError("absorption solve needs k > 0");

    const PotentialPair pair = potential_pair(P, g);
    RadialFn kw0 = axpy(P.k, pair.w0, 0.0, pair.w0);

    RadialFn u = kw0;
    std::vector<double> history;
    SolveReport rep;
    bool converged = lambda == 0.0;
    if (converged) rep.iterations = 0;
    for (int it = 1; it <= max_iter && !converged; ++it) {
        RadialFn gup = green_apply(pow_fn(u, P.p), P);
        RadialFn un = axpy(1.0, kw0, -lambda, gup);
        for (double& x : un.values) x = std::max(x, 0.0);
        un.tag = kw0.tag;  // k w0 dominates; the subtracted part is milder
        un.singular_coeff = kw0.singular_coeff;

        const double res = sup_diff(un.values, u.values) / std::max(un.sup_abs(), 1e-30);
        history.push_back(res);
        if (history.size() >= 2 && res > history[history.size() - 2]) {
            for (int i = 0; i < g->size(); ++i)
                un.values[i] = 0.5 * (un.values[i] + u.values[i]);
        }
        u = un;
        rep.iterations = it;
        if (res <= tol) {
            rep.fixed_point_residual = res;
            converged = true;
        }
    }
    if (!converged)
        throw ConvergenceError("absorption iteration did not reach tolerance", history);

    rep.profile = u;
    rep.v_part = axpy(1.0, u, -1.0, kw0);
    rep.m_theta = gradient_mass(u, P).m_theta;
    // distributional check: -Δu + lambda u^p = k δ0 is the m = -1/lambda case
    rep.weak_residual = lambda > 0.0 ? weak_residual(u, P, -1.0 / lambda)
                                     : weak_residual(u, P, 1.0, 0.0);
    rep.singular_coeff_measured = fit_singular_coeff(u, P, &rep.fit_basis);

    rep.barrier_ok = true;
    const double stol = 1e-9 * std::max(1.0, kw0.sup_abs());
    const double kp = std::pow(P.k, P.p);
    for (int i = 0; i < g->size(); ++i) {
        const double lo = std::max(0.0, kw0.values[i] - lambda * kp * pair.w1.values[i]);
        if (u.values[i] > kw0.values[i] + stol || u.values[i] < lo - stol)
            rep.barrier_ok = false;
    }
    return rep;
}

BranchReport negative_branch_solve(const Params& P, const GridPtr& g, double tol) {
    P.validate();
    if (!(P.theta < 0.0)) throw DomainError("negative branch needs theta < 0");
    if (!(P.k > 0.0 && P.k < -P.theta))
        throw DomainError("negative branch needs k in (0, -theta)");
    if (!(P.p < P.p_star())) throw DomainError("negative branch needs subcritical p");

    const double inner_tol = std::min(1e-10, 0.01 * tol);
    auto mass_at = [&](double lam) {
        return absorption_solve(P, lam, g, inner_tol).m_theta;
    };
    auto F = [&](double lam) { return 1.0 / (-mass_at(lam)) - lam; };

    BranchReport rep;
    rep.lambda_1 = -1.0 / (P.k + P.theta);
    const double m1 = mass_at(rep.lambda_1);
    rep.lambda_2 = -1.0 / m1;
    rep.F_values.emplace_back(rep.lambda_1, rep.lambda_2 - rep.lambda_1);

    double lo = std::min(rep.lambda_1, rep.lambda_2);
    double hi = std::max(rep.lambda_1, rep.lambda_2);
    double flo = lo == rep.lambda_1 ? rep.lambda_2 - rep.lambda_1 : F(lo);
    double fhi = hi == rep.lambda_1 ? rep.lambda_2 - rep.lambda_1 : F(hi);
    if (lo != rep.lambda_1) rep.F_values.emplace_back(lo, flo);
    if (hi != rep.lambda_1) rep.F_values.emplace_back(hi, fhi);
    rep.bracket_sign_change = (flo >= 0.0 && fhi <= 0.0) || (flo <= 0.0 && fhi >= 0.0);
    if (!rep.bracket_sign_change)
        throw BracketError("branch function does not change sign on the bracket",
                           rep.F_values);

    const double bracket_lo = lo;
    double root = lo, froot = flo;
    if (std::abs(fhi) < std::abs(froot)) root = hi, froot = fhi;
    for (int it = 0; it < 200 && std::abs(froot) > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = F(mid);
        rep.F_values.emplace_back(mid, fm);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        root = mid;
        froot = fm;
        if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    }
    if (std::abs(froot) > tol)
        throw ConvergenceError("branch bisection stalled above tolerance", {std::abs(froot)});

    rep.root = root;
    rep.m_theta_at_root = mass_at(root);

    // continuity modulus on 5 adjacent pairs from 6 equally spaced lambdas
    const double span_lo = bracket_lo, span_hi = std::max(rep.lambda_1, rep.lambda_2);
    std::vector<double> masses;
    for (int j = 0; j < 6; ++j)
        masses.push_back(mass_at(span_lo + (span_hi - span_lo) * j / 5.0));
    double worst = -std::numeric_limits<double>::infinity();
    const double dl = (span_hi - span_lo) / 5.0;
    for (int j = 0; j + 1 < 6; ++j) {
        const double bound = std::pow(dl / span_lo, 1.0 / P.p) * P.k;
        worst = std::max(worst, std::abs(masses[j + 1] - masses[j]) - bound);
    }
    rep.continuity_modulus_check = worst;
    return rep;
}

}  // namespace ksing
