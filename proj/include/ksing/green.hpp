#pragma once

#include "ksing/radial.hpp"

namespace ksing {

// Dirac potential w0 and its iterate w1 = G[w0^p]; both vanish at r = 1 and
// decrease strictly on (0, 1).
struct PotentialPair {
    RadialFn w0;
    RadialFn w1;
};

// Exact closed form of the zero-boundary solution of -Δu = δ0 on the unit
// ball: c_N (r^{2-N} - 1) for N >= 3, -(ln r)/(2π) for N = 2.
RadialFn dirac_potential(const Params& P, const GridPtr& g);

// Zero-boundary inverse Laplacian of a radial source:
//   u(r) = ∫_r^1 s^{1-N} m(s) ds,   m(s) = ∫_0^s t^{N-1} f(t) dt,
// nested cumulative quadrature in t = ln r, the sub-r_min part of m from the
// source tag in closed form.  The output tag follows the decay algebra of
// potential_decay_class.
RadialFn green_apply(const RadialFn& f, const Params& P);

PotentialPair potential_pair(const Params& P, const GridPtr& g);

// pointwise |u|^p with sign discarded (sources are nonnegative); tag raised
// to the p-th power
RadialFn pow_fn(const RadialFn& u, double p);

// a*u + b*v on a shared grid; tag of the result is the dominant of the two
RadialFn axpy(double a, const RadialFn& u, double b, const RadialFn& v);

enum class DecayKind { power, log_type, bounded };

struct DecayClass {
    DecayKind kind;
    double exponent;  // 2 - tau for the power case, 0 otherwise
};

// Behavior at the origin of G[r^{-tau}]: power(2-tau) if tau > 2, log if
// tau = 2, bounded if tau < 2.  Requires 0 < tau < N.
DecayClass potential_decay_class(double tau, int N);

// Discrete divergence-form residual of -(r^{N-1} u')' = r^{N-1} f, evaluated
// in t as |-d/dt(r^{N-2} du/dt) - r^N f| and normalized by max |r^N f|.
// Pointwise (zeros at the two-node edges) and its interior maximum.
std::vector<double> operator_residual_pointwise(const RadialFn& u, const RadialFn& f,
                                                const Params& P);
double operator_residual(const RadialFn& u, const RadialFn& f, const Params& P);

}  // namespace ksing
