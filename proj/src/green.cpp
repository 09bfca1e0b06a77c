#include "ksing/green.hpp"

#include <algorithm>
#include <cmath>

namespace ksing {

RadialFn dirac_potential(const Params& P, const GridPtr& g) {
    P.validate();
    std::vector<double> v(g->size());
    SingularTag tag;
    double coeff;
    if (P.N == 2) {
        coeff = 1.0 / (2.0 * M_PI);
        tag = SingularTag::log_at_origin();
        for (int i = 0; i < g->size(); ++i) v[i] = -coeff * std::log(g->nodes[i]);
    } else {
        coeff = P.c_N();
        tag = SingularTag::power(2.0 - P.N);
        for (int i = 0; i < g->size(); ++i)
            v[i] = coeff * (std::pow(g->nodes[i], 2.0 - P.N) - 1.0);
    }
    v.back() = 0.0;
    return RadialFn(g, std::move(v), tag, coeff);
}

RadialFn pow_fn(const RadialFn& u, double p) {
    std::vector<double> v(u.values.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = std::pow(std::abs(u.values[i]), p);
    SingularTag tag = u.tag;
    double coeff = 0.0;
    if (!u.tag.is_none()) {
        tag.alpha *= p;
        tag.log_pow *= p;
        if (tag.alpha == 0.0 && tag.log_pow == 0.0) tag.kind = TagKind::none;
        else if (tag.log_pow == 0.0) tag.kind = TagKind::power;
        else tag.kind = TagKind::log_type;
        coeff = std::pow(std::abs(u.singular_coeff), p);
    }
    return RadialFn(u.grid, std::move(v), tag, coeff);
}

namespace {

// true if tag a dominates tag b at the origin (more singular)
bool dominates(const SingularTag& a, const SingularTag& b) {
    if (a.is_none()) return false;
    if (b.is_none()) return true;
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    return a.log_pow > b.log_pow;
}

}  // namespace

RadialFn axpy(double a, const RadialFn& u, double b, const RadialFn& v) {
    if (u.grid != v.grid) throw DomainError("operands live on different grids");
    std::vector<double> w(u.values.size());
    for (size_t i = 0; i < w.size(); ++i) w[i] = a * u.values[i] + b * v.values[i];
    SingularTag tag;
    double coeff = 0.0;
    const SingularTag &tu = u.tag, &tv = v.tag;
    if (dominates(tu, tv)) {
        tag = tu;
        coeff = a * u.singular_coeff;
    } else if (dominates(tv, tu)) {
        tag = tv;
        coeff = b * v.singular_coeff;
    } else if (!tu.is_none()) {  // equal tags: coefficients add
        tag = tu;
        coeff = a * u.singular_coeff + b * v.singular_coeff;
        if (coeff == 0.0) tag = SingularTag::none_tag();
    }
    return RadialFn(u.grid, std::move(w), tag, coeff);
}

DecayClass potential_decay_class(double tau, int N) {
    if (!(tau > 0.0) || !(tau < double(N)))
        throw DomainError("decay class defined for tau in (0, N)");
    if (tau > 2.0) return {DecayKind::power, 2.0 - tau};
    if (tau == 2.0) return {DecayKind::log_type, 0.0};
    return {DecayKind::bounded, 0.0};
}

RadialFn green_apply(const RadialFn& f, const Params& P) {
    P.validate();
    const RadialGrid& g = *f.grid;
    const int n = g.size();

    // inner mass m(s) = ∫_0^s t^{N-1} f dt; the (0, r_min) part closes from
    // the tag and must converge (alpha + N > 0)
    double head = 0.0;
    if (!f.tag.is_none())
        head = head_power_log(f.singular_coeff, f.tag.alpha + P.N - 1, f.tag.log_pow, g.r_min);
    else
        head = f.values.front() * std::pow(g.r_min, double(P.N)) / P.N;

    std::vector<double> integrand(n);
    for (int i = 0; i < n; ++i) integrand[i] = f.values[i] * std::pow(g.nodes[i], double(P.N));
    std::vector<double> m = cumulative_from_start_t(g, integrand);
    for (double& mi : m) mi += head;

    // outer shell integral u(r) = ∫_r^1 s^{2-N} m(s) dt
    std::vector<double> shell(n);
    for (int i = 0; i < n; ++i) shell[i] = std::pow(g.nodes[i], 2.0 - P.N) * m[i];
    std::vector<double> u = cumulative_to_end_t(g, shell);
    u.back() = 0.0;

    // decay algebra for the output tag
    SingularTag out;
    double coeff = 0.0;
    if (!f.tag.is_none()) {
        const double a = f.tag.alpha, q = f.tag.log_pow, c = f.singular_coeff;
        if (a + 2.0 < 0.0) {
            out = SingularTag::power_log(a + 2.0, q);
            if (q == 0.0) out = SingularTag::power(a + 2.0);
            coeff = c / ((a + P.N) * (-(a + 2.0)));
        } else if (a + 2.0 == 0.0) {
            out = SingularTag::power_log(0.0, q + 1.0);
            coeff = c / ((a + P.N) * (q + 1.0));
        }
        // a + 2 > 0: bounded at the origin, tag stays none
    }
    return RadialFn(f.grid, std::move(u), out, coeff);
}

PotentialPair potential_pair(const Params& P, const GridPtr& g) {
    PotentialPair pair;
    pair.w0 = dirac_potential(P, g);
    pair.w1 = green_apply(pow_fn(pair.w0, P.p), P);
    return pair;
}

std::vector<double> operator_residual_pointwise(const RadialFn& u, const RadialFn& f,
                                                const Params& P) {
    const RadialGrid& g = *u.grid;
    const int n = g.size();
    if (n < 8) throw DomainError("operator residual needs a real grid");
    std::vector<double> du = derivative_t(g, u.values);
    std::vector<double> flux(n);
    for (int i = 0; i < n; ++i) flux[i] = std::pow(g.nodes[i], P.N - 2.0) * du[i];
    std::vector<double> dflux = derivative_t(g, flux);
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        scale = std::max(scale, std::abs(std::pow(g.nodes[i], double(P.N)) * f.values[i]));
    if (scale == 0.0) scale = 1.0;
    std::vector<double> res(n, 0.0);
    for (int i = 2; i < n - 2; ++i) {
        const double rhs = std::pow(g.nodes[i], double(P.N)) * f.values[i];
        res[i] = std::abs(-dflux[i] - rhs) / scale;
    }
    return res;
}

double operator_residual(const RadialFn& u, const RadialFn& f, const Params& P) {
    std::vector<double> res = operator_residual_pointwise(u, f, P);
    double worst = 0.0;
    for (double v : res) worst = std::max(worst, v);
    return worst;
}

}  // namespace ksing
