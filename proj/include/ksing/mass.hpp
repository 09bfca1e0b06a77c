#pragma once

#include "ksing/radial.hpp"

namespace ksing {

// For radial nonincreasing u vanishing at r = 1, |∇u| = -u', so the
// Kirchhoff coefficient is theta + sigma_N ∫ (-u') r^{N-1} dr.  The
// integration-by-parts identity
//   grad_mass = boundary_flux_term + l1_weighted
// is carried along as a second, independent route to the same number.
struct MassReport {
    double grad_mass = 0.0;           // ∫ |∇u| dx
    double m_theta = 0.0;             // theta + grad_mass
    double boundary_flux_term = 0.0;  // sigma_N lim_{r->0} u(r) r^{N-1}
    double l1_weighted = 0.0;         // (N-1) sigma_N ∫_0^1 u s^{N-2} ds
};

MassReport gradient_mass(const RadialFn& u, const Params& P);

// Distributional residual against the built-in test family
// xi_j = (1 - r^2)^j, j in {1, 2}:
//   max_j | ∫ u (-Δ xi_j) dx - (w / m_theta) ∫ u^p xi_j dx - k |.
// p_term_weight = 0 drops the nonlinear term (pure -Δu = k δ0 check).
double weak_residual(const RadialFn& u, const Params& P, double m_theta,
                     double p_term_weight = 1.0);

}  // namespace ksing
