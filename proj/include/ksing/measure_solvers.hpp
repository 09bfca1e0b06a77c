#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ksing/criteria.hpp"
#include "ksing/mass.hpp"
#include "ksing/radial.hpp"

namespace ksing {

// Outcome of a Dirac-data solve.  profile = v_part + k w0 nodewise.
// barrier_ok records the operation's own enclosure: for the fixed-point
// solve, 0 <= v_part <= t_p k^p w1; for the absorption solve, the sandwich
// k w0 - lambda k^p w1 <= u <= k w0.
struct SolveReport {
    RadialFn profile;
    RadialFn v_part;
    double m_theta = 0.0;
    int iterations = 0;
    double fixed_point_residual = 0.0;
    double weak_residual = 0.0;
    double singular_coeff_measured = 0.0;
    bool barrier_ok = false;
    std::string fit_basis;  // "r^(2-N)" or "-ln r"
};

// Picard iteration of v -> G[(v + k w0)^p] / M_theta(v + k w0) on the
// invariant order interval [0, t_p k^p w1], from v = 0 (or from the top).
SolveReport weak_singularity_solve(const Params& P, const GridPtr& g, double tol = 1e-6,
                                   int max_iter = 200, bool start_at_barrier_top = false);

// Unique positive solution of -Δu + lambda u^p = k δ0 by Picard iteration
// u -> max(0, k w0 - lambda G[u^p]) from u = k w0.
SolveReport absorption_solve(const Params& P, double lambda, const GridPtr& g,
                             double tol = 1e-10, int max_iter = 400);

// Root search for F(lambda) = 1/(-M_theta(u_lambda)) - lambda on the bracket
// spanned by lambda_1 = -1/(k+theta) and lambda_2 = -1/M_theta(u_{lambda_1}).
struct BranchReport {
    double lambda_1 = 0.0;
    double lambda_2 = 0.0;
    std::vector<std::pair<double, double>> F_values;
    double root = 0.0;
    double m_theta_at_root = 0.0;
    bool bracket_sign_change = false;
    // max over 5 adjacent lambda-pairs of |ΔM| - ((λ''-λ')/λ_min)^{1/p} k;
    // nonpositive (within tol) when the continuity modulus holds
    double continuity_modulus_check = 0.0;
};

BranchReport negative_branch_solve(const Params& P, const GridPtr& g, double tol = 1e-8);

}  // namespace ksing
