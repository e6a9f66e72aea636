#ifndef PRONYKIT_STABILITY_HPP
#define PRONYKIT_STABILITY_HPP

#include <cstdint>
#include <vector>

#include "pronykit/prony_core.hpp"

namespace pronykit
{

///
/// Perturbation bounds for the Prony problem restricted to a fixed
/// multiplicity structure, solved from the first s + r moments:
///
///   |da_{j,l}| <= 2/l! (2/delta)^{s+r} (1/2 + (s+r)/delta)^{d_j - l}
///                 (1 + |a_{j,l-1}| / |a_{j,d_j-1}|) eps,      a_{j,-1} = 0,
///   |dtau_j|   <= 2/d_j! (2/delta)^{s+r} eps / |a_{j,d_j-1}|,
///
/// with delta the minimal node separation.
///
struct StabilityBounds
{
    std::vector<double> tau;                 // per node
    std::vector<std::vector<double>> coeffs; // per node, per derivative order
    double eps = 0.0;
    double delta = 0.0;
    int s0 = 0;
    int r0 = 0;
};

/// Throws Error(DegenerateInput) for fewer than two nodes, coincident nodes
/// or a vanishing highest-order coefficient.
StabilityBounds stability_bounds(const SpikeSignal& f, double eps);

/// Jacobian of the restricted mapping, V(tau_1, d_1+1, ..., tau_s, d_s+1)
/// times blockdiag(E_j). Column order per node: a_{j,0..d_j-1}, then tau_j.
CMatrix restricted_jacobian(const SpikeSignal& f);

/// The first s + r moments of f (the restricted Prony mapping).
CVector restricted_moments(const SpikeSignal& f);

struct ValidationReport
{
    StabilityBounds bounds;
    std::vector<double> max_tau_error;
    std::vector<std::vector<double>> max_coeff_error;
    double max_ratio = 0.0; // largest empirical error / bound
    int violations = 0;     // trials with at least one parameter over its bound
    int divergences = 0;    // trials where the fixed-structure solve failed
    int trials = 0;
    std::uint64_t seed = 0;
};

/// Monte Carlo check of the bounds: perturbs the first s + r moments by
/// uniform complex noise in the disk of radius eps and re-solves with the
/// multiplicity structure fixed (Newton iteration seeded at f).
ValidationReport validate_bounds(const SpikeSignal& f, double eps, int trials,
                                 std::uint64_t seed);

} // namespace pronykit

#endif
