#include "pronykit/prony_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pronykit
{

std::string_view to_string(ErrorCode code)
{
    switch (code)
    {
        case ErrorCode::InvalidInput:
            return "invalid_input";
        case ErrorCode::Unsolvable:
            return "unsolvable";
        case ErrorCode::SingularMatrix:
            return "singular_matrix";
        case ErrorCode::RootFindingFailure:
            return "root_finding_failure";
        case ErrorCode::ResidualTooLarge:
            return "residual_too_large";
        case ErrorCode::IllConditionedDDSystem:
            return "ill_conditioned_dd_system";
        case ErrorCode::DegenerateInput:
            return "degenerate_input";
        case ErrorCode::PronyFailure:
            return "prony_failure";
        case ErrorCode::NoRootNearCircle:
            return "no_root_near_circle";
        case ErrorCode::BranchAmbiguity:
            return "branch_ambiguity";
    }
    return "unknown";
}

std::size_t SpikeSignal::order() const
{
    std::size_t d = 0;
    for (const auto& c : coeffs)
        d += c.size();
    return d;
}

std::vector<int> SpikeSignal::multiplicities() const
{
    std::vector<int> mult;
    mult.reserve(coeffs.size());
    for (const auto& c : coeffs)
        mult.push_back(static_cast<int>(c.size()));
    return mult;
}

CVector SpikeSignal::flat_coeffs() const
{
    CVector a(static_cast<Eigen::Index>(order()));
    Eigen::Index idx = 0;
    for (const auto& c : coeffs)
        for (const auto& v : c)
            a(idx++) = v;
    return a;
}

void SpikeSignal::validate() const
{
    if (nodes.size() != coeffs.size())
        throw Error(ErrorCode::InvalidInput,
                    "signal: nodes and coefficient blocks differ in count");
    for (std::size_t j = 0; j < nodes.size(); ++j)
    {
        if (coeffs[j].empty())
            throw Error(ErrorCode::InvalidInput,
                        "signal: node multiplicity must be positive");
        if (coeffs[j].back() == Complex(0.0))
            throw Error(ErrorCode::InvalidInput,
                        "signal: highest-order coefficient of a node is zero");
        for (std::size_t i = 0; i < j; ++i)
            if (nodes[i] == nodes[j])
                throw Error(ErrorCode::InvalidInput,
                            "signal: nodes must be pairwise distinct");
    }
}

SpikeSignal make_signal(std::span<const Complex> nodes,
                        std::span<const int> multiplicities,
                        const CVector& flat_coeffs)
{
    if (nodes.size() != multiplicities.size())
        throw Error(ErrorCode::InvalidInput,
                    "make_signal: nodes/multiplicities size mismatch");
    SpikeSignal f;
    f.nodes.assign(nodes.begin(), nodes.end());
    Eigen::Index idx = 0;
    for (int dj : multiplicities)
    {
        if (dj <= 0 || idx + dj > flat_coeffs.size())
            throw Error(ErrorCode::InvalidInput,
                        "make_signal: bad multiplicity vector");
        std::vector<Complex> block(flat_coeffs.data() + idx,
                                   flat_coeffs.data() + idx + dj);
        f.coeffs.push_back(std::move(block));
        idx += dj;
    }
    if (idx != flat_coeffs.size())
        throw Error(ErrorCode::InvalidInput,
                    "make_signal: coefficient count does not match order");
    return f;
}

void MomentSequence::validate() const
{
    if (values.empty() || values.size() % 2 != 0)
        throw Error(ErrorCode::InvalidInput,
                    "moment sequence must have even length >= 2");
    if (noise_bounds)
    {
        if (noise_bounds->size() != values.size())
            throw Error(ErrorCode::InvalidInput,
                        "noise_bounds must match the moment count");
        for (double e : *noise_bounds)
            if (!(e >= 0.0))
                throw Error(ErrorCode::InvalidInput,
                            "noise_bounds must be nonnegative");
    }
}

std::size_t MultiplicityStructure::order() const
{
    return static_cast<std::size_t>(
        std::accumulate(multiplicities.begin(), multiplicities.end(), 0));
}

double default_collision_tol(std::span<const Complex> w)
{
    double m = 0.0;
    for (const auto& x : w)
        m = std::max(m, std::abs(x));
    return 1e-8 * (1.0 + m);
}

MultiplicityStructure multiplicity_structure(std::span<const Complex> w,
                                             double collision_tol)
{
    MultiplicityStructure ms;
    for (const auto& x : w)
    {
        auto it = std::find_if(ms.values.begin(), ms.values.end(),
                               [&](const Complex& t) {
                                   return collision_tol == 0.0
                                              ? t == x
                                              : std::abs(t - x) <= collision_tol;
                               });
        if (it == ms.values.end())
        {
            ms.values.push_back(x);
            ms.multiplicities.push_back(1);
        }
        else
        {
            ++ms.multiplicities[static_cast<std::size_t>(it - ms.values.begin())];
        }
    }
    return ms;
}

double falling_factorial(int k, int l)
{
    if (l > k)
        return 0.0;
    double r = 1.0;
    for (int i = 0; i < l; ++i)
        r *= static_cast<double>(k - i);
    return r;
}

Complex int_pow(Complex x, int n)
{
    Complex result(1.0, 0.0);
    Complex base = x;
    while (n > 0)
    {
        if (n & 1)
            result *= base;
        base *= base;
        n >>= 1;
    }
    return result;
}

MomentSequence prony_mapping(const SpikeSignal& f, int num_moments)
{
    if (num_moments < 1)
        throw Error(ErrorCode::InvalidInput, "prony_mapping: num_moments < 1");
    MomentSequence mu;
    mu.values.assign(static_cast<std::size_t>(num_moments), Complex(0.0));
    for (std::size_t j = 0; j < f.nodes.size(); ++j)
    {
        const Complex x = f.nodes[j];
        for (int k = 0; k < num_moments; ++k)
        {
            Complex acc(0.0);
            for (std::size_t l = 0; l < f.coeffs[j].size(); ++l)
            {
                const int li = static_cast<int>(l);
                if (li > k)
                    break;
                acc += f.coeffs[j][l] * falling_factorial(k, li) * int_pow(x, k - li);
            }
            mu.values[static_cast<std::size_t>(k)] += acc;
        }
    }
    return mu;
}

CMatrix confluent_vandermonde(std::span<const Complex> nodes,
                              std::span<const int> multiplicities,
                              int num_rows)
{
    if (nodes.size() != multiplicities.size())
        throw Error(ErrorCode::InvalidInput,
                    "confluent_vandermonde: nodes/multiplicities size mismatch");
    for (std::size_t j = 0; j < nodes.size(); ++j)
    {
        if (multiplicities[j] <= 0)
            throw Error(ErrorCode::InvalidInput,
                        "confluent_vandermonde: multiplicities must be positive");
        for (std::size_t i = 0; i < j; ++i)
            if (nodes[i] == nodes[j])
                throw Error(ErrorCode::InvalidInput,
                            "confluent_vandermonde: repeated node");
    }
    const int d = std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
    const int rows = num_rows < 0 ? d : num_rows;
    CMatrix V = CMatrix::Zero(rows, d);
    int col = 0;
    for (std::size_t j = 0; j < nodes.size(); ++j)
    {
        for (int l = 0; l < multiplicities[j]; ++l, ++col)
            for (int k = l; k < rows; ++k)
                V(k, col) = falling_factorial(k, l) * int_pow(nodes[j], k - l);
    }
    return V;
}

CVector solve_coefficient_system(std::span<const Complex> nodes,
                                 std::span<const int> multiplicities,
                                 std::span<const Complex> first_moments)
{
    for (std::size_t j = 0; j < nodes.size(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (nodes[i] == nodes[j])
                throw Error(ErrorCode::SingularMatrix,
                            "confluent Vandermonde is singular; merge repeated nodes first");
    const CMatrix V = confluent_vandermonde(nodes, multiplicities);
    if (static_cast<std::size_t>(V.rows()) != first_moments.size())
        throw Error(ErrorCode::InvalidInput,
                    "solve_coefficient_system: need exactly d moments");
    const CVector rhs = Eigen::Map<const CVector>(
        first_moments.data(), static_cast<Eigen::Index>(first_moments.size()));

    Eigen::FullPivLU<CMatrix> lu(V);
    lu.setThreshold(1e-14);
    if (!lu.isInvertible())
        throw Error(ErrorCode::SingularMatrix,
                    "confluent Vandermonde is singular; merge repeated nodes first");
    CVector a = lu.solve(rhs);
    // one step of iterative refinement
    a += lu.solve(rhs - V * a);
    if (!a.allFinite())
        throw Error(ErrorCode::SingularMatrix,
                    "confluent Vandermonde solve produced non-finite values");
    return a;
}

} // namespace pronykit
