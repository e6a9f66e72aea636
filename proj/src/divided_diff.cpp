#include "pronykit/divided_diff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pronykit
{

namespace
{

// Taylor coefficients (orders 0..len-1) of prod_{i != j} (tau_j - tau_i + t)^{-d_i}.
std::vector<Complex> cofactor_series(const MultiplicityStructure& ms, std::size_t j,
                                     std::size_t len)
{
    std::vector<Complex> g(len, Complex(0.0));
    g[0] = 1.0;
    for (std::size_t i = 0; i < ms.distinct(); ++i)
    {
        if (i == j)
            continue;
        const Complex delta = ms.values[j] - ms.values[i];
        const int n = ms.multiplicities[i];
        // (delta + t)^{-n} = delta^{-n} sum_p C(n+p-1, p) (-t/delta)^p
        std::vector<Complex> factor(len);
        const Complex u = -1.0 / delta;
        Complex up(1.0);
        double binom = 1.0;
        for (std::size_t p = 0; p < len; ++p)
        {
            if (p > 0)
            {
                binom = binom * static_cast<double>(n + static_cast<int>(p) - 1) /
                        static_cast<double>(p);
                up *= u;
            }
            factor[p] = binom * up;
        }
        const Complex lead = 1.0 / int_pow(delta, n);
        std::vector<Complex> prod(len, Complex(0.0));
        for (std::size_t a = 0; a < len; ++a)
            for (std::size_t b = 0; a + b < len; ++b)
                prod[a + b] += g[a] * factor[b];
        for (auto& v : prod)
            v *= lead;
        g = std::move(prod);
    }
    return g;
}

} // namespace

SpikeSignal DividedDifferenceBasis::as_signal(std::size_t m) const
{
    const Term& t = terms.at(m - 1);
    SpikeSignal f;
    f.nodes = t.structure.values;
    for (const auto& block : t.pf)
    {
        std::vector<Complex> c(block.size());
        double fact = 1.0;
        for (std::size_t l = 0; l < block.size(); ++l)
        {
            if (l > 0)
                fact *= static_cast<double>(l);
            c[l] = block[l] / fact;
        }
        f.coeffs.push_back(std::move(c));
    }
    return f;
}

DividedDifferenceBasis dd_basis(std::span<const Complex> w)
{
    if (w.empty())
        throw Error(ErrorCode::InvalidInput, "dd_basis: empty node vector");
    DividedDifferenceBasis basis;
    basis.w.assign(w.begin(), w.end());
    for (std::size_t m = 1; m <= w.size(); ++m)
    {
        DividedDifferenceBasis::Term term;
        term.structure = multiplicity_structure(w.subspan(0, m), 0.0);
        const auto& ms = term.structure;
        for (std::size_t j = 0; j < ms.distinct(); ++j)
        {
            const auto dj = static_cast<std::size_t>(ms.multiplicities[j]);
            const auto g = cofactor_series(ms, j, dj);
            // coefficient of (z - tau_j)^{-l} is the t^{d_j - l} Taylor coefficient
            std::vector<Complex> block(dj);
            for (std::size_t l = 1; l <= dj; ++l)
                block[l - 1] = g[dj - l];
            term.pf.push_back(std::move(block));
        }
        basis.terms.push_back(std::move(term));
    }
    return basis;
}

CMatrix dd_moments(std::span<const Complex> w, int num_moments)
{
    const DividedDifferenceBasis basis = dd_basis(w);
    CMatrix nu(num_moments, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t m = 1; m <= basis.size(); ++m)
    {
        const MomentSequence mk = prony_mapping(basis.as_signal(m), num_moments);
        for (int k = 0; k < num_moments; ++k)
            nu(k, static_cast<Eigen::Index>(m - 1)) = mk.values[static_cast<std::size_t>(k)];
    }
    return nu;
}

DDSolution solve_prony_dd(const MomentSequence& mu, const DDSolveOptions& opts)
{
    mu.validate();
    const auto report = classify(mu, opts.rank_tol);
    const int d = static_cast<int>(mu.half_order());
    if (!report.solvable || report.rank != d)
        throw Error(ErrorCode::Unsolvable,
                    "solve_prony_dd: requires a solvable moment sequence of full rank " +
                        std::to_string(d) + " (got rank " + std::to_string(report.rank) + ")");

    const Polynomial Q = prony_denominator(mu.values, d);
    std::vector<Complex> roots = polynomial_roots(Q);
    std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });

    // Collided roots are snapped onto a common (refined) value.
    double rmax = 0.0;
    for (const auto& z : roots)
        rmax = std::max(rmax, std::abs(z));
    const double tol = opts.collision_tol * (1.0 + rmax);
    const auto ms = multiplicity_structure(roots, tol);
    std::vector<Complex> centre(ms.distinct(), Complex(0.0));
    std::vector<std::size_t> owner(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i)
    {
        std::size_t best = 0;
        for (std::size_t j = 1; j < ms.distinct(); ++j)
            if (std::abs(roots[i] - ms.values[j]) < std::abs(roots[i] - ms.values[best]))
                best = j;
        owner[i] = best;
        centre[best] += roots[i];
    }
    for (std::size_t j = 0; j < ms.distinct(); ++j)
    {
        const int m = ms.multiplicities[j];
        centre[j] /= static_cast<double>(m);
        if (m > 1)
        {
            const auto p = poly_derivative(Q, m - 1);
            const auto dp = poly_derivative(p);
            Complex z = centre[j];
            for (int it = 0; it < 20; ++it)
            {
                const Complex df = poly_eval(dp, z);
                if (df == Complex(0.0))
                    break;
                const Complex zn = z - poly_eval(p, z) / df;
                if (!(std::abs(poly_eval(p, zn)) < std::abs(poly_eval(p, z))))
                    break;
                z = zn;
            }
            if (std::abs(z - centre[j]) <= std::max(tol, 1e-12))
                centre[j] = z;
        }
    }
    DDSolution sol;
    sol.w.resize(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i)
        sol.w[i] = centre[owner[i]];

    const CMatrix nu = dd_moments(sol.w, 2 * d);
    const CMatrix A = nu.topRows(d);
    Eigen::JacobiSVD<CMatrix> svd(A);
    const auto& sv = svd.singularValues();
    sol.condition_number = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                    : std::numeric_limits<double>::infinity();
    if (!(sol.condition_number <= opts.max_condition))
        throw Error(ErrorCode::IllConditionedDDSystem,
                    "solve_prony_dd: divided-difference system is numerically singular "
                    "(condition number " + std::to_string(sol.condition_number) + ")");

    CVector rhs(d);
    for (int k = 0; k < d; ++k)
        rhs(k) = mu.values[static_cast<std::size_t>(k)];
    Eigen::FullPivLU<CMatrix> lu(A);
    CVector beta = lu.solve(rhs);
    beta += lu.solve(rhs - A * beta);
    sol.beta.assign(beta.data(), beta.data() + beta.size());

    const CVector pred = nu * beta;
    double diff = 0.0;
    double scale = 0.0;
    for (int k = 0; k < 2 * d; ++k)
    {
        diff = std::max(diff, std::abs(pred(k) - mu.values[static_cast<std::size_t>(k)]));
        scale = std::max(scale, std::abs(mu.values[static_cast<std::size_t>(k)]));
    }
    sol.residual = scale > 0.0 ? diff / scale : diff;
    return sol;
}

SpikeSignal dd_to_standard(const DDSolution& sol)
{
    if (sol.w.size() != sol.beta.size())
        throw Error(ErrorCode::InvalidInput, "dd_to_standard: w and beta differ in length");
    const auto basis = dd_basis(sol.w);
    const auto full = multiplicity_structure(sol.w, 0.0);

    std::vector<std::vector<Complex>> coeffs(full.distinct());
    for (std::size_t j = 0; j < full.distinct(); ++j)
        coeffs[j].assign(static_cast<std::size_t>(full.multiplicities[j]), Complex(0.0));

    for (std::size_t m = 1; m <= basis.size(); ++m)
    {
        const SpikeSignal delta = basis.as_signal(m);
        for (std::size_t j = 0; j < delta.nodes.size(); ++j)
        {
            const auto it = std::find(full.values.begin(), full.values.end(), delta.nodes[j]);
            const auto idx = static_cast<std::size_t>(it - full.values.begin());
            for (std::size_t l = 0; l < delta.coeffs[j].size(); ++l)
                coeffs[idx][l] += sol.beta[m - 1] * delta.coeffs[j][l];
        }
    }

    // Trailing zero coefficients do not belong to the signal's structure.
    SpikeSignal f;
    for (std::size_t j = 0; j < full.distinct(); ++j)
    {
        auto& c = coeffs[j];
        while (!c.empty() && c.back() == Complex(0.0))
            c.pop_back();
        if (c.empty())
            continue;
        f.nodes.push_back(full.values[j]);
        f.coeffs.push_back(std::move(c));
    }
    return f;
}

} // namespace pronykit
