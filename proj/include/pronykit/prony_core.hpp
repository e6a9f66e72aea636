#ifndef PRONYKIT_PRONY_CORE_HPP
#define PRONYKIT_PRONY_CORE_HPP

#include <optional>
#include <span>
#include <vector>

#include "pronykit/types.hpp"

namespace pronykit
{

///
/// Linear combination of shifted delta functions and their derivatives,
///
///   F(x) = sum_j sum_{l < d_j} coeffs[j][l] * delta^{(l)}(x - nodes[j]).
///
/// The multiplicity of node j is coeffs[j].size(). The highest-order
/// coefficient of every node must be nonzero, except for the empty signal
/// (no nodes), which represents the zero distribution.
///
struct SpikeSignal
{
    std::vector<Complex> nodes;
    std::vector<std::vector<Complex>> coeffs;

    std::size_t degree() const { return nodes.size(); }
    std::size_t order() const;
    std::vector<int> multiplicities() const;

    /// Coefficients flattened as (a_{1,0},...,a_{1,d_1-1},a_{2,0},...).
    CVector flat_coeffs() const;

    /// Throws Error(InvalidInput) if the signal violates its invariants.
    void validate() const;
};

/// Builds a signal from nodes, multiplicities and flattened coefficients.
SpikeSignal make_signal(std::span<const Complex> nodes,
                        std::span<const int> multiplicities,
                        const CVector& flat_coeffs);

struct MomentSequence
{
    std::vector<Complex> values;
    std::optional<std::vector<double>> noise_bounds;

    /// Half the length; the order of the Prony problem posed by the data.
    std::size_t half_order() const { return values.size() / 2; }

    void validate() const;
};

/// Distinct values of a node vector, in order of first appearance, with
/// the number of times each appears.
struct MultiplicityStructure
{
    std::vector<Complex> values;
    std::vector<int> multiplicities;

    std::size_t distinct() const { return values.size(); }
    std::size_t order() const;
};

/// 1e-8 * (1 + max |x_i|).
double default_collision_tol(std::span<const Complex> w);

/// Groups entries of w that lie within collision_tol of an earlier
/// representative (collision_tol = 0 means exact equality).
MultiplicityStructure multiplicity_structure(std::span<const Complex> w,
                                             double collision_tol = 0.0);

/// k!/(k-l)!, zero when l > k.
double falling_factorial(int k, int l);

/// x^n for n >= 0 with 0^0 = 1.
Complex int_pow(Complex x, int n);

/// Moments m_k = sum_j sum_l a_{j,l} k!/(k-l)! x_j^{k-l}, k < num_moments.
MomentSequence prony_mapping(const SpikeSignal& f, int num_moments);

/// Confluent Vandermonde matrix with num_rows rows (defaults to d rows).
/// Column (j,l) holds k!/(k-l)! x_j^{k-l} in row k.
CMatrix confluent_vandermonde(std::span<const Complex> nodes,
                              std::span<const int> multiplicities,
                              int num_rows = -1);

/// Solves V(T,D) a = (m_0,...,m_{d-1}) for the flattened coefficients.
/// Throws Error(SingularMatrix) if T has (numerically) repeated entries.
CVector solve_coefficient_system(std::span<const Complex> nodes,
                                 std::span<const int> multiplicities,
                                 std::span<const Complex> first_moments);

} // namespace pronykit

#endif
