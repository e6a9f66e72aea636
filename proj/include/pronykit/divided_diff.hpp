#ifndef PRONYKIT_DIVIDED_DIFF_HPP
#define PRONYKIT_DIVIDED_DIFF_HPP

#include <span>
#include <vector>

#include "pronykit/prony_core.hpp"
#include "pronykit/prony_solve.hpp"

namespace pronykit
{

///
/// Finite differences Delta_m(w), m = 1..d, of a node vector w with possible
/// collisions. For the prefix w_m = (x_1..x_m) with structure (T_m, D_m),
///
///   prod_j (z - tau_{j,m})^{-d_{j,m}} = sum_j sum_{l=1}^{d_{j,m}} c_{j,l} / (z - tau_{j,m})^l
///
/// and Delta_m = sum_j sum_l c_{j,l} / (l-1)! delta^{(l-1)}(x - tau_{j,m}).
///
struct DividedDifferenceBasis
{
    struct Term
    {
        MultiplicityStructure structure; // of the prefix w_m
        /// partial-fraction coefficients; pf[j][l-1] multiplies (z - tau_j)^{-l}
        std::vector<std::vector<Complex>> pf;
    };

    std::vector<Complex> w;
    std::vector<Term> terms; // terms[m-1] describes Delta_m

    std::size_t size() const { return terms.size(); }

    /// Delta_m written as a spike signal (standard basis at T(w_m)).
    SpikeSignal as_signal(std::size_t m) const;
};

/// Partial-fraction coefficients via residue formulas (Taylor expansion of
/// the co-factor product at each pole). Entries of w are compared exactly.
DividedDifferenceBasis dd_basis(std::span<const Complex> w);

/// nu(k, m-1) = int x^k Delta_m(w) dx, k < num_moments.
CMatrix dd_moments(std::span<const Complex> w, int num_moments);

struct DDSolution
{
    std::vector<Complex> w;
    std::vector<Complex> beta;
    double condition_number = 0.0;
    double residual = 0.0; // relative, over all 2d moments
};

struct DDSolveOptions
{
    double rank_tol = kDefaultRankTol;
    /// Relative tolerance under which computed roots are treated as one
    /// collided node: collision_tol * (1 + max |root|).
    double collision_tol = 1e-8;
    /// Condition number of the nu-system above which the solve is rejected.
    double max_condition = 1e14;
};

/// Errors: Unsolvable (including rank < d), IllConditionedDDSystem.
DDSolution solve_prony_dd(const MomentSequence& mu, const DDSolveOptions& opts = {});

/// Expands sum_m beta_m Delta_m(w) in the standard basis of V_w.
SpikeSignal dd_to_standard(const DDSolution& sol);

} // namespace pronykit

#endif
