#include "pronykit/stability.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "pronykit/parallel.hpp"

namespace pronykit
{

namespace
{

void require_regular(const SpikeSignal& f)
{
    if (f.nodes.empty())
        throw Error(ErrorCode::DegenerateInput, "stability: empty signal");
    if (f.nodes.size() != f.coeffs.size())
        throw Error(ErrorCode::InvalidInput, "stability: malformed signal");
    for (std::size_t j = 0; j < f.nodes.size(); ++j)
    {
        if (f.coeffs[j].empty() || f.coeffs[j].back() == Complex(0.0))
            throw Error(ErrorCode::DegenerateInput,
                        "stability: highest-order coefficient of a node vanishes");
        for (std::size_t i = 0; i < j; ++i)
            if (f.nodes[i] == f.nodes[j])
                throw Error(ErrorCode::DegenerateInput, "stability: coincident nodes");
    }
}

double factorial(int n)
{
    double r = 1.0;
    for (int i = 2; i <= n; ++i)
        r *= i;
    return r;
}

} // namespace

StabilityBounds stability_bounds(const SpikeSignal& f, double eps)
{
    require_regular(f);
    if (f.nodes.size() < 2)
        throw Error(ErrorCode::DegenerateInput,
                    "stability_bounds: node separation undefined for a single node");
    if (!(eps >= 0.0))
        throw Error(ErrorCode::InvalidInput, "stability_bounds: eps must be nonnegative");

    StabilityBounds b;
    b.eps = eps;
    b.s0 = static_cast<int>(f.degree());
    b.r0 = static_cast<int>(f.order());
    b.delta = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.nodes.size(); ++i)
        for (std::size_t j = i + 1; j < f.nodes.size(); ++j)
            b.delta = std::min(b.delta, std::abs(f.nodes[i] - f.nodes[j]));

    const int n = b.s0 + b.r0;
    const double sep = std::pow(2.0 / b.delta, n);
    for (std::size_t j = 0; j < f.nodes.size(); ++j)
    {
        const int dj = static_cast<int>(f.coeffs[j].size());
        const double top = std::abs(f.coeffs[j].back());
        const double tau_factor = 2.0 / factorial(dj) * sep / top;
        b.tau.push_back(tau_factor * eps);

        std::vector<double> ab;
        for (int l = 0; l < dj; ++l)
        {
            const double prev = l == 0 ? 0.0 : std::abs(f.coeffs[j][static_cast<std::size_t>(l - 1)]);
            const double factor = 2.0 / factorial(l) * sep *
                                  std::pow(0.5 + n / b.delta, dj - l) * (1.0 + prev / top);
            ab.push_back(factor * eps);
        }
        b.coeffs.push_back(std::move(ab));
    }
    return b;
}

CMatrix restricted_jacobian(const SpikeSignal& f)
{
    require_regular(f);
    const int s = static_cast<int>(f.degree());
    const int r = static_cast<int>(f.order());
    const int n = s + r;

    std::vector<int> extended = f.multiplicities();
    for (auto& d : extended)
        ++d;
    const CMatrix V = confluent_vandermonde(f.nodes, extended, n);

    CMatrix E = CMatrix::Zero(n, n);
    int off = 0;
    for (std::size_t j = 0; j < f.nodes.size(); ++j)
    {
        const int dj = static_cast<int>(f.coeffs[j].size());
        for (int i = 0; i < dj; ++i)
            E(off + i, off + i) = 1.0;
        // last column (tau_j): (0, a_{j,0}, ..., a_{j,d_j-1})
        for (int i = 0; i < dj; ++i)
            E(off + i + 1, off + dj) = f.coeffs[j][static_cast<std::size_t>(i)];
        off += dj + 1;
    }
    return V * E;
}

CVector restricted_moments(const SpikeSignal& f)
{
    const int n = static_cast<int>(f.degree() + f.order());
    const auto mu = prony_mapping(f, n);
    return Eigen::Map<const CVector>(mu.values.data(), n);
}

namespace
{

struct TrialResult
{
    bool diverged = false;
    std::vector<double> tau_err;
    std::vector<std::vector<double>> coeff_err;
};

SpikeSignal unpack(const SpikeSignal& shape, const CVector& p)
{
    SpikeSignal g = shape;
    Eigen::Index idx = 0;
    for (std::size_t j = 0; j < g.nodes.size(); ++j)
    {
        for (auto& c : g.coeffs[j])
            c = p(idx++);
        g.nodes[j] = p(idx++);
    }
    return g;
}

CVector pack(const SpikeSignal& f)
{
    CVector p(static_cast<Eigen::Index>(f.degree() + f.order()));
    Eigen::Index idx = 0;
    for (std::size_t j = 0; j < f.nodes.size(); ++j)
    {
        for (const auto& c : f.coeffs[j])
            p(idx++) = c;
        p(idx++) = f.nodes[j];
    }
    return p;
}

TrialResult run_trial(const SpikeSignal& f, const CVector& target, std::uint64_t seed,
                      int trial, double eps)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    CVector noisy = target;
    for (Eigen::Index k = 0; k < noisy.size(); ++k)
    {
        const double rad = eps * std::sqrt(unit(rng));
        const double ang = 2.0 * M_PI * unit(rng);
        noisy(k) += std::polar(rad, ang);
    }

    TrialResult res;
    CVector p = pack(f);
    bool finite = true;
    for (int it = 0; it < 30; ++it)
    {
        const SpikeSignal g = unpack(f, p);
        const CVector F = restricted_moments(g) - noisy;
        const CMatrix J = restricted_jacobian(g);
        Eigen::FullPivLU<CMatrix> lu(J);
        if (!lu.isInvertible())
        {
            finite = false;
            break;
        }
        const CVector step = lu.solve(-F);
        p += step;
        if (!p.allFinite())
        {
            finite = false;
            break;
        }
        if (step.norm() <= 1e-14 * (1.0 + p.norm()))
            break;
    }
    bool converged = false;
    if (finite)
    {
        const SpikeSignal g = unpack(f, p);
        const CVector F = restricted_moments(g) - noisy;
        converged = F.norm() <= 1e-12 * (1.0 + noisy.norm());
    }
    if (!converged)
    {
        res.diverged = true;
        return res;
    }

    const SpikeSignal g = unpack(f, p);
    for (std::size_t j = 0; j < f.nodes.size(); ++j)
    {
        res.tau_err.push_back(std::abs(g.nodes[j] - f.nodes[j]));
        std::vector<double> ce;
        for (std::size_t l = 0; l < f.coeffs[j].size(); ++l)
            ce.push_back(std::abs(g.coeffs[j][l] - f.coeffs[j][l]));
        res.coeff_err.push_back(std::move(ce));
    }
    return res;
}

} // namespace

ValidationReport validate_bounds(const SpikeSignal& f, double eps, int trials,
                                 std::uint64_t seed)
{
    ValidationReport rep;
    rep.bounds = stability_bounds(f, eps);
    rep.trials = trials;
    rep.seed = seed;
    rep.max_tau_error.assign(f.degree(), 0.0);
    for (const auto& c : f.coeffs)
        rep.max_coeff_error.emplace_back(c.size(), 0.0);

    const CVector target = restricted_moments(f);
    std::vector<TrialResult> results(static_cast<std::size_t>(std::max(trials, 0)));
    parallel_for(results.size(), [&](std::size_t t) {
        try
        {
            results[t] = run_trial(f, target, seed, static_cast<int>(t), eps);
        }
        catch (const Error&)
        {
            results[t].diverged = true;
        }
    });

    for (const auto& r : results)
    {
        if (r.diverged)
        {
            ++rep.divergences;
            continue;
        }
        bool violated = false;
        auto check = [&](double err, double bound) {
            if (err > bound)
                violated = true;
            if (bound > 0.0)
                rep.max_ratio = std::max(rep.max_ratio, err / bound);
        };
        for (std::size_t j = 0; j < f.nodes.size(); ++j)
        {
            rep.max_tau_error[j] = std::max(rep.max_tau_error[j], r.tau_err[j]);
            check(r.tau_err[j], rep.bounds.tau[j]);
            for (std::size_t l = 0; l < r.coeff_err[j].size(); ++l)
            {
                rep.max_coeff_error[j][l] = std::max(rep.max_coeff_error[j][l], r.coeff_err[j][l]);
                check(r.coeff_err[j][l], rep.bounds.coeffs[j][l]);
            }
        }
        if (violated)
            ++rep.violations;
    }
    return rep;
}

} // namespace pronykit
