#ifndef PRONYKIT_PRONY_SOLVE_HPP
#define PRONYKIT_PRONY_SOLVE_HPP

#include <optional>
#include <span>
#include <vector>

#include "pronykit/prony_core.hpp"
#include "pronykit/solvability.hpp"

namespace pronykit
{

/// Monic polynomial coefficients, lowest degree first; the implicit leading
/// coefficient 1 is stored as the last entry.
using Polynomial = std::vector<Complex>;

/// Evaluates sum_i c_i z^i (Horner).
Complex poly_eval(std::span<const Complex> coeffs, Complex z);

/// Coefficients of the n-th derivative.
std::vector<Complex> poly_derivative(std::span<const Complex> coeffs, int n = 1);

/// All roots of a monic polynomial (lowest degree first, last entry 1),
/// via companion-matrix eigenvalues and one Newton polish per root.
/// Throws Error(RootFindingFailure) on non-convergence.
std::vector<Complex> polynomial_roots(std::span<const Complex> monic);

/// The Stieltjes transform R(z) = P(z)/Q(z) of a recovered signal.
struct RationalSolution
{
    std::vector<Complex> numerator;   // deg < r, lowest degree first
    std::vector<Complex> denominator; // monic, deg r, lowest degree first
    MultiplicityStructure poles;
};

/// Solves M_r q = (m_r,...,m_{2r-1}) and returns the monic denominator
/// Q(z) = z^r - q_{r-1} z^{r-1} - ... - q_0 (lowest degree first), so that
/// m_{k+r} = sum_{i<r} q_i m_{k+i}.
Polynomial prony_denominator(std::span<const Complex> moments, int r);

struct SolveOptions
{
    double rank_tol = kDefaultRankTol;
    /// Relative clustering tolerance; the absolute value is
    /// cluster_tol * (1 + max |root|).
    double cluster_tol = 1e-6;
    /// Coarsest relative clustering tolerance tried when validating the
    /// multiplicity structure.
    double max_cluster_tol = 1e-1;
    /// Relative round-trip moment residual that a solution must reach.
    double residual_tol = 1e-8;
    /// Overrides the numerical rank (noisy data).
    std::optional<int> forced_rank;
};

struct PronySolution
{
    SpikeSignal signal;
    SolvabilityReport report;
    RationalSolution rational;
    double residual = 0.0; // see moment_residual
};

/// Global inversion of the Prony mapping.
/// Errors: Unsolvable, RootFindingFailure, ResidualTooLarge.
PronySolution solve_prony(const MomentSequence& mu, const SolveOptions& opts = {});

/// Coefficients of z^{-k-1}, k < n, in the expansion at infinity of
/// sum_j sum_l l! a_{j,l} / (z - x_j)^{l+1}.
std::vector<Complex> stieltjes_taylor(const SpikeSignal& f, int n);

/// max_k |m_k(f) - m_k| / max_k |m_k| over all entries of mu (absolute when
/// mu is identically zero).
double moment_residual(const SpikeSignal& f, const MomentSequence& mu);

} // namespace pronykit

#endif
