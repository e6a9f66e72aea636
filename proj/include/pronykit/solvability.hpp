#ifndef PRONYKIT_SOLVABILITY_HPP
#define PRONYKIT_SOLVABILITY_HPP

#include <vector>

#include "pronykit/prony_core.hpp"

namespace pronykit
{

/// The d x (d+1) Hankel matrix full(i,j) = m_{i+j} of a 2d-moment sequence.
struct HankelPencil
{
    CMatrix full;

    Eigen::Index order() const { return full.rows(); }

    /// Leading e x e block M_e.
    CMatrix square_minor(Eigen::Index e) const { return full.topLeftCorner(e, e); }
};

enum class Stratum
{
    Solvable,   // Sigma_r
    Unsolvable, // Sigma'_r
};

struct SolvabilityReport
{
    int rank = 0;
    bool solvable = true;
    Stratum stratum = Stratum::Solvable;
    double leading_minor = 0.0;          // |det M_r|
    std::vector<double> singular_values; // of the full Hankel matrix
};

inline constexpr double kDefaultRankTol = 1e-10;

/// Throws Error(InvalidInput) on odd-length input.
HankelPencil build_hankel(const MomentSequence& mu);

///
/// Numerical rank r of the Hankel matrix (singular values above
/// rank_tol * sigma_max) and the leading-minor test |det M_r| >
/// rank_tol * sigma_1 * ... * sigma_r. The all-zero sequence is reported as
/// rank 0 and solvable (the empty signal).
///
SolvabilityReport classify(const MomentSequence& mu,
                           double rank_tol = kDefaultRankTol);

struct EscapeOptions
{
    double threshold = 1e3;
};

struct EscapeReport
{
    std::vector<double> max_node_magnitude;
    /// |a_{j,d_j-1} x_j^{2d-1}| for every node, per step.
    std::vector<std::vector<double>> node_weights;
    /// |a_j x_j^{2d-1}| of the node with the largest magnitude, per step.
    std::vector<double> escaping_weight;
    bool escape_detected = false;
};

/// Diagnoses node escape to infinity along a path of solutions approaching
/// the unsolvable set. order_d is the half-length of the moment data.
EscapeReport escape_diagnostic(const std::vector<SpikeSignal>& path, int order_d,
                               const EscapeOptions& opts = {});

} // namespace pronykit

#endif
