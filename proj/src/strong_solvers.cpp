#include "ksing/strong_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ksing/errors.hpp"
#include "ksing/green.hpp"
#include "ksing/mass.hpp"

namespace ksing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// x'' + a x' + c x = sgn * lam * x^p in t = ln r
struct Fowler {
    double a, c, sgn, p;
};

// odd extension keeps stray negative excursions finite for fractional p
double pow_signed(double x, double p) {
    return x >= 0.0 ? std::pow(x, p) : -std::pow(-x, p);
}

void rk4_step(const Fowler& fc, double h, double& x, double& y) {
    auto fy = [&](double xs, double ys) {
        return -fc.a * ys - fc.c * xs + fc.sgn * pow_signed(xs, fc.p);
    };
    const double k1x = y, k1y = fy(x, y);
    const double k2x = y + 0.5 * h * k1y, k2y = fy(x + 0.5 * h * k1x, y + 0.5 * h * k1y);
    const double k3x = y + 0.5 * h * k2y, k3y = fy(x + 0.5 * h * k2x, y + 0.5 * h * k2y);
    const double k4x = y + h * k3y, k4y = fy(x + h * k3x, y + h * k3y);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
}

struct Run {
    std::vector<double> x;  // node values when stored
    bool crossed = false;   // went below zero after the start
    bool blew_up = false;   // exceeded the ceiling
    double x_end = 0.0;
};

constexpr int kSubsteps = 4;

// forward: start at node 0, march to node n-1; backward: the reverse.
// Early exit on either flag so bisection probes stay cheap.
Run integrate(const Fowler& fc, const RadialGrid& g, bool forward, double x0, double y0,
              double ceiling, bool store) {
    const int n = g.size();
    const double h = (forward ? 1.0 : -1.0) * g.log_step / kSubsteps;
    Run run;
    if (store) run.x.assign(n, 0.0);
    double x = x0, y = y0;
    auto put = [&](int node) {
        if (store) run.x[node] = x;
    };
    put(forward ? 0 : n - 1);
    for (int step = 0; step < n - 1; ++step) {
        for (int s = 0; s < kSubsteps; ++s) {
            rk4_step(fc, h, x, y);
            if (x < 0.0) run.crossed = true;
            if (x > ceiling) run.blew_up = true;
        }
        put(forward ? step + 1 : n - 2 - step);
        if (run.crossed || run.blew_up) {
            if (!store) break;
        }
    }
    run.x_end = x;
    return run;
}

std::vector<int> fit_window(const RadialGrid& g) {
    std::vector<int> idx;
    for (int i = 0; i < g.size(); ++i)
        if (g.nodes[i] >= 1e-5 && g.nodes[i] <= 1e-3) idx.push_back(i);
    if ((int)idx.size() < 4) {
        idx.clear();
        for (int i = g.size() / 8; i < g.size() / 4; ++i) idx.push_back(i);
    }
    return idx;
}

// least-squares slope of ln u (optionally log-corrected) against ln r
double slope_fit(const RadialGrid& g, const std::vector<double>& lnu,
                 const std::vector<int>& idx) {
    double st = 0.0, su = 0.0, stt = 0.0, stu = 0.0;
    for (int i : idx) {
        const double t = std::log(g.nodes[i]);
        st += t;
        su += lnu[i];
        stt += t * t;
        stu += t * lnu[i];
    }
    const double n = double(idx.size());
    return (n * stu - st * su) / (n * stt - st * st);
}

// max_i |x'' + a x' + c x - sgn lam x^p| / max_i |lam x^p| over interior nodes
double fowler_residual(const RadialGrid& g, const std::vector<double>& x, const Fowler& fc,
                       double lam) {
    const int n = g.size();
    if (n < 8) throw DomainError("ODE residual needs at least 8 nodes");
    const double h = g.log_step;
    std::vector<double> dx = derivative_t(g, x);
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(lam * pow_signed(x[i], fc.p)));
    scale = std::max(scale, 1e-300);
    double worst = 0.0;
    for (int i = 2; i <= n - 4; ++i) {
        const double xdd =
            (-x[i - 2] + 16.0 * x[i - 1] - 30.0 * x[i] + 16.0 * x[i + 1] - x[i + 2]) /
            (12.0 * h * h);
        const double res =
            xdd + fc.a * dx[i] + fc.c * x[i] - fc.sgn * lam * pow_signed(x[i], fc.p);
        worst = std::max(worst, std::abs(res));
    }
    return worst / scale;
}

RadialFn scaled_copy(const RadialFn& u, double s) { return axpy(s, u, 0.0, u); }

}  // namespace

ProfileReport strong_profile(const Params& P, StrongRegime regime, const GridPtr& g,
                             double tol) {
    P.validate();
    const RadialGrid& grid = *g;
    const int n = grid.size();
    const double gamma = 2.0 / (P.p - 1.0);
    const double ps = P.p_star();

    bool critical = false;
    Fowler fc{P.N - 2.0 - 2.0 * gamma, gamma * (gamma + 2.0 - P.N), 0.0, P.p};
    if (regime == StrongRegime::absorption) {
        if (!(P.p > 1.0 && P.p < ps))
            throw DomainError("absorption profile needs 1 < p < N/(N-2)");
        fc.sgn = 1.0;
    } else {
        if (P.N < 3) throw DomainError("source profile needs N >= 3");
        if (!(P.p >= ps - 1e-12))
            throw DomainError("source profile needs p >= N/(N-2)");
        if (!(P.p < (P.N + 2.0) / (P.N - 2.0)))
            throw DomainError("source profile needs p < (N+2)/(N-2)");
        fc.sgn = -1.0;
        critical = std::abs(P.p - ps) <= 1e-12;
    }

    std::vector<double> x;
    double shoot = 0.0;

    if (regime == StrongRegime::absorption) {
        // saddle connection: bisect on beta = -u'(1), integrating backward
        // from (x, x')(0) = (0, -beta); too small decays to 0, too large
        // escapes above the equilibrium
        const double xstar = std::pow(fc.c, 1.0 / (P.p - 1.0));
        auto is_up = [&](double beta) {
            Run r = integrate(fc, grid, false, 0.0, -beta, 3.0 * xstar, false);
            if (r.blew_up) return true;
            if (r.crossed) return false;
            return r.x_end >= xstar;
        };
        double lo = 0.0, hi = 1.0;
        int grow = 0;
        while (!is_up(hi)) {
            hi *= 2.0;
            if (++grow > 60) throw ShootingError("no escape above the equilibrium found");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (is_up(mid) ? hi : lo) = mid;
        }
        shoot = 0.5 * (lo + hi);
        x = integrate(fc, grid, false, 0.0, -shoot, kInf, true).x;
    } else if (!critical) {
        // unstable spiral: leave the equilibrium at t = ln r_min along the
        // slow eigendirection with amplitude eta, forward to t = 0; the
        // boundary profile is the first zero of x landing exactly at t = 0
        const double xstar = std::pow(-fc.c, 1.0 / (P.p - 1.0));
        const double q = (P.p - 1.0) * (-fc.c);
        const double disc = fc.a * fc.a - 4.0 * q;
        const double slope = disc < 0.0 ? -0.5 * fc.a : 0.5 * (-fc.a - std::sqrt(disc));
        auto hits_zero = [&](double eta) {
            Run r = integrate(fc, grid, true, xstar * (1.0 + eta), xstar * eta * slope,
                              50.0 * xstar, false);
            return r.crossed || r.blew_up || r.x_end <= 0.0;
        };
        double lo = 1e-8;
        int guard = 0;
        while (hits_zero(lo)) {
            lo /= 10.0;
            if (++guard > 40) throw ShootingError("every amplitude reaches zero too early");
        }
        double hi = 1e-3;
        guard = 0;
        while (!hits_zero(hi)) {
            hi *= 2.0;
            if (++guard > 60) throw ShootingError("no amplitude reaches zero by the boundary");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (hits_zero(mid) ? hi : lo) = mid;
        }
        shoot = lo;  // certified positive all the way to t = 0
        x = integrate(fc, grid, true, xstar * (1.0 + shoot), xstar * shoot * slope, kInf, true).x;
        x.back() = 0.0;
    } else {
        // p = N/(N-2): the equilibrium degenerates; backward shots fall onto
        // an attracting slow manifold with a universal asymptote, so any
        // positive-staying beta does
        for (int j = 0; j <= 40; ++j) {
            const double beta = std::pow(2.0, (j % 2 ? 1 : -1) * ((j + 1) / 2));
            Run r = integrate(fc, grid, false, 0.0, -beta, 1e9, true);
            if (!r.crossed && !r.blew_up) {
                shoot = beta;
                x = std::move(r.x);
                break;
            }
        }
        if (x.empty()) throw ShootingError("no positive-staying shot onto the slow manifold");
    }

    // assemble u = x r^{-gamma}
    std::vector<double> values(n);
    std::vector<double> lnu(n, -kInf);
    for (int i = 0; i < n; ++i) {
        const double t = std::log(grid.nodes[i]);
        values[i] = x[i] * std::exp(-gamma * t);
        if (values[i] > 0.0) lnu[i] = std::log(values[i]);
    }
    values.back() = 0.0;

    const std::vector<int> idx = fit_window(grid);
    for (int i : idx)
        if (!(values[i] > 0.0)) throw ShootingError("profile not positive in the fit window");

    ProfileReport rep;
    rep.shoot_param = shoot;
    if (critical) {
        const double half = 0.5 * (P.N - 2.0);
        std::vector<double> corrected(lnu);
        double acc = 0.0;
        for (int i : idx) {
            const double t = std::log(grid.nodes[i]);
            corrected[i] += half * std::log(-t);
            acc += corrected[i] + (P.N - 2.0) * t;
        }
        rep.exponent_fit = slope_fit(grid, corrected, idx);
        rep.coeff_fit = std::exp(acc / double(idx.size()));
        rep.coeff_ref = std::pow(0.5 * (P.N - 2.0) * (P.N - 2.0), 0.5 * (P.N - 2.0));
        rep.coeff_ref_alt = singularity_coeff(P, CoeffRegime::source_critical);
        rep.regime_label = "source critical";
    } else {
        double acc = 0.0;
        for (int i : idx) acc += lnu[i] + gamma * std::log(grid.nodes[i]);
        rep.exponent_fit = slope_fit(grid, lnu, idx);
        rep.coeff_fit = std::exp(acc / double(idx.size()));
        rep.coeff_ref = singularity_coeff(P, regime == StrongRegime::absorption
                                                 ? CoeffRegime::absorption_subcritical
                                                 : CoeffRegime::source_supercritical);
        rep.coeff_ref_alt = 0.0;
        rep.regime_label = regime == StrongRegime::absorption ? "absorption" : "source";
    }

    SingularTag tag = critical ? SingularTag::power_log(2.0 - P.N, -0.5 * (P.N - 2.0))
                               : SingularTag::power(-gamma);
    rep.profile = RadialFn(g, std::move(values), tag, rep.coeff_fit);

    const bool finite = regime == StrongRegime::source || gamma < P.N - 1.0;
    if (finite) {
        rep.grad_mass = gradient_mass(rep.profile, P).grad_mass;
        rep.grad_mass_finite = true;
    } else {
        rep.grad_mass = kInf;
        rep.grad_mass_finite = false;
    }

    rep.ode_residual = fowler_residual(grid, x, fc, 1.0);
    if (!(rep.ode_residual <= tol))
        throw ConvergenceError("ODE residual above tolerance", {rep.ode_residual});
    return rep;
}

double scaled_ode_residual(const ProfileReport& rep, const Params& P, StrongRegime regime,
                           double lambda) {
    if (!(lambda > 0.0)) throw DomainError("scaling needs lambda > 0");
    const RadialGrid& grid = *rep.profile.grid;
    const double gamma = 2.0 / (P.p - 1.0);
    const Fowler fc{P.N - 2.0 - 2.0 * gamma, gamma * (gamma + 2.0 - P.N),
                    regime == StrongRegime::absorption ? 1.0 : -1.0, P.p};
    const double s = std::pow(lambda, -1.0 / (P.p - 1.0));
    std::vector<double> xs(grid.size());
    for (int i = 0; i < grid.size(); ++i)
        xs[i] = s * rep.profile.values[i] * std::pow(grid.nodes[i], gamma);
    return fowler_residual(grid, xs, fc, lambda);
}

namespace {

// monotone bisection to a sign change on [lo, hi], then Newton polish
template <class F, class DF>
double refine_root(F f, DF df, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double r = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {
        const double d = df(r);
        if (d == 0.0) break;
        const double step = f(r) / d;
        const double next = r - step;
        if (!(next > lo && next < hi)) break;
        r = next;
    }
    return r;
}

}  // namespace

ScalarBranchReport scalar_branch(const Params& P, double m, ScalarBranch branch) {
    P.validate();
    if (!(m > 0.0)) throw DomainError("gradient mass must be positive");
    const double p = P.p, th = P.theta;
    const double ps = P.p_star();

    ScalarBranchReport rep;
    rep.m = m;

    if (branch == ScalarBranch::negative_theta_absorption) {
        if (!(th < 0.0)) throw DomainError("negative branch needs theta < 0");
        if (!(p > (P.N + 1.0) / (P.N - 1.0) && p < ps))
            throw DomainError("negative branch needs (N+1)/(N-1) < p < N/(N-2)");
        const double lam0 = std::pow(m / (-th), p - 1.0);
        auto den = [&](double lam) { return std::pow(lam, -1.0 / (p - 1.0)) * m + th; };
        auto F = [&](double lam) { return 1.0 / den(lam) + lam; };
        auto dF = [&](double lam) {
            const double d = den(lam);
            return 1.0 + m * std::pow(lam, -p / (p - 1.0)) / ((p - 1.0) * d * d);
        };
        double lo = lam0 * (1.0 + 1e-12);
        int guard = 0;
        while (!(F(lo) < 0.0)) {
            lo = lam0 + 0.5 * (lo - lam0);
            if (++guard > 80) throw BracketError("no negative value above the window edge", {});
        }
        double hi = std::max(2.0 * lam0, 1.0);
        guard = 0;
        while (!(F(hi) > 0.0)) {
            hi *= 2.0;
            if (++guard > 200) throw BracketError("branch function never turns positive", {});
        }
        rep.lambda_bar = refine_root(F, dF, lo, hi);
        rep.case_label = "negative-mass absorption";
        rep.lambda_window = {lam0, kInf};
        rep.m_theta = den(rep.lambda_bar);
        rep.identity_residual = std::abs(F(rep.lambda_bar));
        return rep;
    }

    // source branch: lambda_bar is the Kirchhoff mass itself,
    // root of F(lam) = theta + lam^{1/(p-1)} m - lam
    if (P.N < 3) throw DomainError("source branch needs N >= 3");
    auto F = [&](double lam) { return th + std::pow(lam, 1.0 / (p - 1.0)) * m - lam; };
    auto dF = [&](double lam) {
        return m / (p - 1.0) * std::pow(lam, (2.0 - p) / (p - 1.0)) - 1.0;
    };
    rep.lambda_window =
        th < 0.0 ? Interval{std::pow(-th / m, p - 1.0), kInf} : Interval{0.0, kInf};

    const bool family = (P.N == 4 || P.N == 5) && p == 2.0 && th == 0.0 &&
                        std::abs(m - 1.0) <= 1e-9;
    if (family) {
        rep.family_flag = true;
        rep.lambda_bar = kNaN;
        rep.m_theta = kNaN;
        rep.case_label = "case 4 family (N in {4,5}, p = 2)";
        rep.identity_residual = std::abs(m - 1.0);
        return rep;
    }

    if (p == 2.0) {
        if (!(ps <= 2.0 + 1e-12))
            throw UnclassifiableError("p = 2 source branch needs N >= 4");
        if (th > 0.0 && m < 1.0) {
            rep.lambda_bar = th / (1.0 - m);
            rep.case_label = "case 2 (p = 2, theta > 0, m < 1)";
        } else {
            throw UnclassifiableError("p = 2 source branch needs theta > 0 and m < 1");
        }
    } else if (th == 0.0) {
        if (!(p >= ps - 1e-12))
            throw UnclassifiableError("theta = 0 source branch needs p >= N/(N-2)");
        rep.lambda_bar = std::pow(m, (p - 1.0) / (p - 2.0));
        rep.case_label = "case 4 (theta = 0)";
    } else if (th > 0.0 && p > 2.0 && p >= ps - 1e-12) {
        // F rises from theta to a single maximum, then falls to -inf
        const double lc = std::pow(m / (p - 1.0), (p - 1.0) / (p - 2.0));
        double hi = 2.0 * lc + 1.0;
        int guard = 0;
        while (!(F(hi) < 0.0)) {
            hi *= 2.0;
            if (++guard > 200) throw BracketError("branch function never turns negative", {});
        }
        rep.lambda_bar = refine_root([&](double l) { return -F(l); },
                                     [&](double l) { return -dF(l); }, lc, hi);
        rep.case_label = "case 1 (p > 2, theta > 0)";
    } else if (th < 0.0 && p < 2.0 && p >= ps - 1e-12) {
        // F falls from theta to a single minimum, then rises to +inf
        const double lc = std::pow(m / (p - 1.0), (p - 1.0) / (p - 2.0));
        double hi = 2.0 * lc + 1.0;
        int guard = 0;
        while (!(F(hi) > 0.0)) {
            hi *= 2.0;
            if (++guard > 200) throw BracketError("branch function never turns positive", {});
        }
        rep.lambda_bar = refine_root(F, dF, lc, hi);
        rep.case_label = "case 3 (p < 2, theta < 0)";
    } else {
        throw UnclassifiableError("no source case covers these parameters");
    }
    rep.m_theta = th + std::pow(rep.lambda_bar, 1.0 / (p - 1.0)) * m;
    rep.identity_residual = std::abs(F(rep.lambda_bar));
    return rep;
}

EndToEndResult end_to_end_strong(const Params& P, StrongRegime regime, const GridPtr& g,
                                 double tol) {
    EndToEndResult out;
    out.profile = strong_profile(P, regime, g, tol);
    const ProfileReport& prof = out.profile;

    out.summary.scaling_residual =
        std::max(scaled_ode_residual(prof, P, regime, 0.5),
                 scaled_ode_residual(prof, P, regime, 4.0));
    {
        RadialFn up = pow_fn(prof.profile, P.p);
        if (up.tag.is_none()) {
            out.summary.nonlinear_term_integrable = true;
        } else {
            const double mm = up.tag.alpha + P.N - 1.0;
            out.summary.nonlinear_term_integrable =
                mm > -1.0 || (mm == -1.0 && up.tag.log_pow < -1.0);
        }
    }

    if (!prof.grad_mass_finite)
        throw DomainError("gradient mass infinite; the scalar branch is undefined");

    const bool family_params = regime == StrongRegime::source && P.theta == 0.0 &&
                               P.p == 2.0 && (P.N == 4 || P.N == 5);
    if (family_params) {
        // normalize to unit gradient mass; then M_theta(lambda v) = lambda for
        // every lambda and a one-parameter family of solutions appears
        RadialFn v1 = scaled_copy(prof.profile, 1.0 / prof.grad_mass);
        out.branch = scalar_branch(P, 1.0, ScalarBranch::supercritical_source);
        out.summary.m_theta = gradient_mass(v1, P).m_theta;
        double worst = 0.0;
        for (double lam : {0.5, 2.0}) {
            const double mt = gradient_mass(scaled_copy(v1, lam), P).m_theta;
            worst = std::max(worst, std::abs(mt - lam));
        }
        out.summary.branch_identity_err = worst;
        out.summary.coeff_asymptotic_err = kNaN;
        out.scaled_profile = std::move(v1);
        return out;
    }

    const ScalarBranch kind = regime == StrongRegime::absorption
                                  ? ScalarBranch::negative_theta_absorption
                                  : ScalarBranch::supercritical_source;
    out.branch = scalar_branch(P, prof.grad_mass, kind);
    const double lb = out.branch.lambda_bar;
    const double s = regime == StrongRegime::absorption ? std::pow(lb, -1.0 / (P.p - 1.0))
                                                        : std::pow(lb, 1.0 / (P.p - 1.0));
    RadialFn u = scaled_copy(prof.profile, s);
    const double mt = gradient_mass(u, P).m_theta;
    out.summary.m_theta = mt;
    if (regime == StrongRegime::absorption) {
        out.summary.branch_identity_err = std::abs(mt + 1.0 / lb);
        const double pred = prof.coeff_ref * std::pow(-mt, 1.0 / (P.p - 1.0));
        out.summary.coeff_asymptotic_err = std::abs(s * prof.coeff_fit / pred - 1.0);
    } else {
        out.summary.branch_identity_err = std::abs(mt - lb);
        const double pred = prof.coeff_ref * std::pow(mt, 1.0 / (P.p - 1.0));
        out.summary.coeff_asymptotic_err = std::abs(s * prof.coeff_fit / pred - 1.0);
    }
    out.scaled_profile = std::move(u);
    return out;
}

}  // namespace ksing
