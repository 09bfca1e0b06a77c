#pragma once

#include <string>

#include "ksing/criteria.hpp"
#include "ksing/measure_solvers.hpp"
#include "ksing/radial.hpp"

namespace ksing {

enum class StrongRegime { absorption, source };

// Profile of the strongly singular equation u'' + ((N-1)/r) u' = ±u^p with
// u(1) = 0 and u ~ coeff * r^{-2/(p-1)} at the origin, integrated in Fowler
// variables x(t) = u r^{2/(p-1)}, t = ln r.
//
//  - absorption (Δu = u^p, 1 < p < p*): backward bisection on beta = -u'(1);
//    the singular equilibrium is a saddle and the profile is the
//    boundary-to-saddle connection.
//  - source (-Δu = u^p, p* < p < (N+2)/(N-2)): the equilibrium is an
//    unstable spiral; forward secant-style search on the correction
//    amplitude eta so that the first zero of x lands exactly at t = 0.
//  - source at p = p*: the equilibrium degenerates into a slow manifold with
//    the universal log-corrected asymptote
//    u ~ ((N-2)^2/2)^{(N-2)/2} r^{2-N} (-ln r)^{-(N-2)/2}; any
//    positive-staying shot converges onto it, so beta is chosen by scan.
struct ProfileReport {
    RadialFn profile;
    double grad_mass = 0.0;  // +inf when the singular head is not integrable
    bool grad_mass_finite = false;
    double exponent_fit = 0.0;
    double coeff_fit = 0.0;
    double ode_residual = 0.0;
    double shoot_param = 0.0;   // beta or eta, regime-dependent
    double coeff_ref = 0.0;     // the regime's closed-form coefficient
    double coeff_ref_alt = 0.0; // critical case only: the alternative value
    std::string regime_label;
};

ProfileReport strong_profile(const Params& P, StrongRegime regime, const GridPtr& g,
                             double tol = 1e-6);

// Residual of the rescaled profile lambda^{-1/(p-1)} v in the lambda-weighted
// equation u'' + ((N-1)/r)u' = ±lambda u^p (same normalization as
// ode_residual).
double scaled_ode_residual(const ProfileReport& rep, const Params& P, StrongRegime regime,
                           double lambda);

enum class ScalarBranch { negative_theta_absorption, supercritical_source };

// Scalar Kirchhoff consistency equation given the unit profile's gradient
// mass m.  Conventions differ per branch:
//   negative:  u = lb^{-1/(p-1)} v with lb = -1/M_theta(u);
//              root of 1/(lb^{-1/(p-1)} m + theta) + lb = 0 on (lambda_0, inf)
//   source:    u = lb^{1/(p-1)} v with lb = M_theta(u);
//              root of theta + lb^{1/(p-1)} m - lb = 0
// (theta = 0, p != 2 gives lb = m^{(p-1)/(p-2)} in the source convention).
struct ScalarBranchReport {
    double lambda_bar = 0.0;
    double m = 0.0;
    std::string case_label;
    Interval lambda_window;
    double m_theta = 0.0;
    bool family_flag = false;       // N in {4,5}, p = 2, theta = 0, m = 1
    double identity_residual = 0.0; // defect of the branch equation at lambda_bar
};

ScalarBranchReport scalar_branch(const Params& P, double m, ScalarBranch branch);

struct StrongSummary {
    double m_theta = 0.0;
    double branch_identity_err = 0.0;   // |M_theta(u) ∓ (1/)lambda_bar|
    double coeff_asymptotic_err = 0.0;  // relative error of the scaled coefficient
    double scaling_residual = 0.0;      // max over lambda in {0.5, 4}
    bool nonlinear_term_integrable = false;
};

struct EndToEndResult {
    ProfileReport profile;
    ScalarBranchReport branch;
    StrongSummary summary;
    RadialFn scaled_profile;  // the self-consistent Kirchhoff solution u
};

// Compose: profile -> gradient mass -> scalar root -> rescale -> verify the
// Kirchhoff identity and the asymptotic coefficient.  The family case
// (N in {4,5}, p = 2, theta = 0) rescales the profile to m = 1 and checks
// M_theta(lambda v) = lambda instead of a single root.
EndToEndResult end_to_end_strong(const Params& P, StrongRegime regime, const GridPtr& g,
                                 double tol = 1e-6);

}  // namespace ksing
