#include "pronykit/prony_solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pronykit
{

Complex poly_eval(std::span<const Complex> coeffs, Complex z)
{
    Complex acc(0.0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        acc = acc * z + *it;
    return acc;
}

std::vector<Complex> poly_derivative(std::span<const Complex> coeffs, int n)
{
    std::vector<Complex> c(coeffs.begin(), coeffs.end());
    for (int step = 0; step < n && !c.empty(); ++step)
    {
        std::vector<Complex> dc;
        for (std::size_t i = 1; i < c.size(); ++i)
            dc.push_back(c[i] * static_cast<double>(i));
        c = std::move(dc);
    }
    return c;
}

namespace
{

double root_scale(std::span<const Complex> coeffs, Complex z)
{
    double cmax = 0.0;
    for (const auto& c : coeffs)
        cmax = std::max(cmax, std::abs(c));
    const double zpow = std::pow(std::max(1.0, std::abs(z)),
                                 static_cast<double>(coeffs.size() - 1));
    return cmax * zpow;
}

// Newton steps accepted only while they decrease |p|.
Complex newton_polish(std::span<const Complex> p, std::span<const Complex> dp,
                      Complex z, int max_steps)
{
    Complex fz = poly_eval(p, z);
    for (int it = 0; it < max_steps; ++it)
    {
        const Complex dfz = poly_eval(dp, z);
        if (dfz == Complex(0.0))
            break;
        const Complex znew = z - fz / dfz;
        const Complex fnew = poly_eval(p, znew);
        if (!(std::abs(fnew) < std::abs(fz)))
            break;
        z = znew;
        fz = fnew;
    }
    return z;
}

bool lex_less(const Complex& a, const Complex& b)
{
    if (a.real() != b.real())
        return a.real() < b.real();
    return a.imag() < b.imag();
}

} // namespace

std::vector<Complex> polynomial_roots(std::span<const Complex> monic)
{
    if (monic.size() < 2)
        throw Error(ErrorCode::InvalidInput, "polynomial_roots: degree must be >= 1");
    if (std::abs(monic.back() - Complex(1.0)) > 1e-12)
        throw Error(ErrorCode::InvalidInput, "polynomial_roots: polynomial must be monic");
    const auto n = static_cast<Eigen::Index>(monic.size() - 1);

    std::vector<Complex> roots;
    if (n == 1)
    {
        roots.push_back(-monic[0]);
    }
    else
    {
        CMatrix companion = CMatrix::Zero(n, n);
        for (Eigen::Index i = 1; i < n; ++i)
            companion(i, i - 1) = 1.0;
        for (Eigen::Index i = 0; i < n; ++i)
            companion(i, n - 1) = -monic[static_cast<std::size_t>(i)];
        Eigen::ComplexEigenSolver<CMatrix> es(companion, false);
        if (es.info() != Eigen::Success)
            throw Error(ErrorCode::RootFindingFailure,
                        "polynomial_roots: companion eigenvalue iteration did not converge");
        const CVector& ev = es.eigenvalues();
        roots.assign(ev.data(), ev.data() + ev.size());
    }

    const std::vector<Complex> dp = poly_derivative(monic);
    for (auto& z : roots)
    {
        z = newton_polish(monic, dp, z, 1);
        const double tol = 1e-8 * root_scale(monic, z);
        if (!(std::abs(poly_eval(monic, z)) <= tol))
        {
            z = newton_polish(monic, dp, z, 50);
            if (!(std::abs(poly_eval(monic, z)) <= tol))
                throw Error(ErrorCode::RootFindingFailure,
                            "polynomial_roots: root residual above tolerance");
        }
    }
    return roots;
}

Polynomial prony_denominator(std::span<const Complex> moments, int r)
{
    if (r < 1 || moments.size() < static_cast<std::size_t>(2 * r))
        throw Error(ErrorCode::InvalidInput,
                    "prony_denominator: need at least 2r moments and r >= 1");
    CMatrix Mr(r, r);
    CVector rhs(r);
    for (int i = 0; i < r; ++i)
    {
        for (int j = 0; j < r; ++j)
            Mr(i, j) = moments[static_cast<std::size_t>(i + j)];
        rhs(i) = moments[static_cast<std::size_t>(i + r)];
    }
    Eigen::FullPivLU<CMatrix> lu(Mr);
    lu.setThreshold(1e-15);
    if (!lu.isInvertible())
        throw Error(ErrorCode::Unsolvable, "prony_denominator: leading Hankel minor is singular");
    CVector q = lu.solve(rhs);
    q += lu.solve(rhs - Mr * q);

    Polynomial Q(static_cast<std::size_t>(r + 1));
    for (int i = 0; i < r; ++i)
        Q[static_cast<std::size_t>(i)] = -q(i);
    Q[static_cast<std::size_t>(r)] = 1.0;
    return Q;
}

double moment_residual(const SpikeSignal& f, const MomentSequence& mu)
{
    const auto n = static_cast<int>(mu.values.size());
    const MomentSequence fm = prony_mapping(f, n);
    double diff = 0.0;
    double scale = 0.0;
    for (int k = 0; k < n; ++k)
    {
        diff = std::max(diff, std::abs(fm.values[static_cast<std::size_t>(k)] -
                                       mu.values[static_cast<std::size_t>(k)]));
        scale = std::max(scale, std::abs(mu.values[static_cast<std::size_t>(k)]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

namespace
{

struct Candidate
{
    SpikeSignal signal;
    MultiplicityStructure structure;
    double residual = std::numeric_limits<double>::infinity();
};

// Cluster the roots with tolerance tol, refine each cluster centre and
// solve the confluent coefficient system.
std::optional<Candidate> build_candidate(const std::vector<Complex>& roots,
                                         const Polynomial& Q, double tol,
                                         const MomentSequence& mu, int r)
{
    MultiplicityStructure ms = multiplicity_structure(roots, tol);

    // Centre of each cluster: mean of its members.
    std::vector<Complex> sum(ms.distinct(), Complex(0.0));
    for (const auto& z : roots)
    {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < ms.distinct(); ++j)
        {
            const double dz = std::abs(z - ms.values[j]);
            if (dz < bd)
            {
                bd = dz;
                best = j;
            }
        }
        sum[best] += z;
    }
    for (std::size_t j = 0; j < ms.distinct(); ++j)
    {
        const int m = ms.multiplicities[j];
        Complex c = sum[j] / static_cast<double>(m);
        if (m > 1)
        {
            // A root of multiplicity m is a simple root of Q^{(m-1)}.
            const auto p = poly_derivative(Q, m - 1);
            const auto dp = poly_derivative(p);
            const Complex refined = newton_polish(p, dp, c, 20);
            if (std::abs(refined - c) <= std::max(tol, 1e-12))
                c = refined;
        }
        ms.values[j] = c;
    }

    // Sort nodes lexicographically for reproducibility.
    std::vector<std::size_t> perm(ms.distinct());
    for (std::size_t i = 0; i < perm.size(); ++i)
        perm[i] = i;
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        return lex_less(ms.values[a], ms.values[b]);
    });
    MultiplicityStructure sorted;
    for (auto i : perm)
    {
        sorted.values.push_back(ms.values[i]);
        sorted.multiplicities.push_back(ms.multiplicities[i]);
    }

    Candidate cand;
    try
    {
        const std::span<const Complex> first(mu.values.data(), static_cast<std::size_t>(r));
        const CVector a = solve_coefficient_system(sorted.values, sorted.multiplicities, first);
        cand.signal = make_signal(sorted.values, sorted.multiplicities, a);
    }
    catch (const Error&)
    {
        return std::nullopt;
    }
    cand.structure = std::move(sorted);
    cand.residual = moment_residual(cand.signal, mu);
    if (!std::isfinite(cand.residual))
        return std::nullopt;
    return cand;
}

// Gauss-Newton on all available moments with the structure held fixed.
// Each accepted step must lower the residual.
void refine_fixed_structure(Candidate& cand, const MomentSequence& mu)
{
    SpikeSignal& f = cand.signal;
    const auto D = f.multiplicities();
    const int n = static_cast<int>(mu.values.size());
    const Eigen::Map<const CVector> m(mu.values.data(), n);
    for (int iter = 0; iter < 6; ++iter)
    {
        std::vector<int> D1(D);
        for (auto& dj : D1)
            ++dj;
        const CMatrix W = confluent_vandermonde(f.nodes, D1, n);
        const Eigen::Index s = static_cast<Eigen::Index>(f.nodes.size());
        const Eigen::Index d = static_cast<Eigen::Index>(f.order());
        CMatrix J(n, d + s);
        Eigen::Index wc = 0, jc = 0;
        for (std::size_t j = 0; j < f.nodes.size(); ++j)
        {
            CVector dnode = CVector::Zero(n);
            for (int l = 0; l < D[j]; ++l)
            {
                J.col(jc++) = W.col(wc + l);
                dnode += f.coeffs[j][static_cast<std::size_t>(l)] * W.col(wc + l + 1);
            }
            J.col(d + static_cast<Eigen::Index>(j)) = dnode;
            wc += D1[j];
        }
        const CVector r = m - J.leftCols(d) * f.flat_coeffs();
        const CVector step = J.colPivHouseholderQr().solve(r);
        if (!step.allFinite())
            return;
        Candidate trial = cand;
        CVector a = f.flat_coeffs() + step.head(d);
        for (Eigen::Index j = 0; j < s; ++j)
            trial.signal.nodes[static_cast<std::size_t>(j)] += step[d + j];
        trial.signal = make_signal(trial.signal.nodes, D, a);
        trial.residual = moment_residual(trial.signal, mu);
        if (!(trial.residual < cand.residual))
            return;
        for (std::size_t j = 0; j < f.nodes.size(); ++j)
            trial.structure.values[j] = trial.signal.nodes[j];
        cand = std::move(trial);
    }
}

} // namespace

PronySolution solve_prony(const MomentSequence& mu, const SolveOptions& opts)
{
    mu.validate();
    PronySolution sol;
    sol.report = classify(mu, opts.rank_tol);
    if (!opts.forced_rank && !sol.report.solvable)
        throw Error(ErrorCode::Unsolvable,
                    "Prony problem is unsolvable: leading minor |M_r| vanishes (rank " +
                        std::to_string(sol.report.rank) + ")");
    const int r = opts.forced_rank.value_or(sol.report.rank);
    if (r < 0 || static_cast<std::size_t>(r) > mu.half_order())
        throw Error(ErrorCode::InvalidInput, "solve_prony: rank out of range");
    if (r == 0)
    {
        sol.residual = moment_residual(sol.signal, mu);
        sol.rational.denominator = {Complex(1.0)};
        return sol;
    }

    const Polynomial Q = prony_denominator(mu.values, r);
    const std::vector<Complex> roots = polynomial_roots(Q);

    double rmax = 0.0;
    for (const auto& z : roots)
        rmax = std::max(rmax, std::abs(z));
    const double scale = 1.0 + rmax;

    // Walk a ladder of clustering tolerances; each distinct structure is a
    // candidate.
    std::vector<Candidate> candidates;
    std::vector<int> last_partition;
    for (double rel = opts.cluster_tol; rel <= opts.max_cluster_tol * (1.0 + 1e-12); rel *= 10.0)
    {
        const double tol = rel * scale;
        const auto ms = multiplicity_structure(roots, tol);
        std::vector<int> partition = ms.multiplicities;
        std::sort(partition.begin(), partition.end());
        if (partition == last_partition)
            continue;
        last_partition = partition;
        if (auto c = build_candidate(roots, Q, tol, mu, r))
            candidates.push_back(std::move(*c));
        if (ms.distinct() == 1)
            break;
    }
    if (candidates.empty())
        throw Error(ErrorCode::ResidualTooLarge,
                    "solve_prony: no clustering of the roots gave a solvable coefficient system");

    // Split copies of a multiple root also fit the moments, with huge
    // cancelling coefficients, so the coarsest structure that meets the
    // residual tolerance wins. Without one, report the best fit.
    const Candidate* chosen = nullptr;
    for (const auto& c : candidates)
        if (c.residual <= opts.residual_tol)
            chosen = &c;
    if (!chosen)
    {
        chosen = &candidates.front();
        for (const auto& c : candidates)
            if (c.residual < chosen->residual)
                chosen = &c;
    }
    Candidate polished = *chosen;
    try
    {
        refine_fixed_structure(polished, mu);
    }
    catch (const Error&)
    {
    }
    chosen = &polished;
    if (chosen->residual > opts.residual_tol)
        throw Error(ErrorCode::ResidualTooLarge,
                    "solve_prony: round-trip moment residual " + std::to_string(chosen->residual) +
                        " above tolerance");

    sol.signal = chosen->signal;
    sol.residual = chosen->residual;
    sol.rational.denominator = Q;
    sol.rational.poles = chosen->structure;
    // P(z) = polynomial part of Q(z) * sum_k m_k z^{-k-1}.
    sol.rational.numerator.assign(static_cast<std::size_t>(r), Complex(0.0));
    for (int j = 0; j < r; ++j)
        for (int i = j + 1; i <= r; ++i)
            sol.rational.numerator[static_cast<std::size_t>(j)] +=
                Q[static_cast<std::size_t>(i)] * mu.values[static_cast<std::size_t>(i - j - 1)];
    return sol;
}

std::vector<Complex> stieltjes_taylor(const SpikeSignal& f, int n)
{
    std::vector<Complex> out(static_cast<std::size_t>(std::max(n, 0)), Complex(0.0));
    for (std::size_t j = 0; j < f.nodes.size(); ++j)
    {
        const Complex x = f.nodes[j];
        double lfact = 1.0;
        for (std::size_t l = 0; l < f.coeffs[j].size(); ++l)
        {
            if (l > 0)
                lfact *= static_cast<double>(l);
            // l! / (z-x)^{l+1} = l! sum_p C(p+l, l) x^p z^{-p-l-1}
            const Complex w = lfact * f.coeffs[j][l];
            Complex xp(1.0);
            double binom = 1.0; // C(p+l, l)
            for (int p = 0; p + static_cast<int>(l) < n; ++p)
            {
                if (p > 0)
                {
                    binom = binom * static_cast<double>(p + static_cast<int>(l)) / p;
                    xp *= x;
                }
                out[static_cast<std::size_t>(p) + l] += w * binom * xp;
            }
        }
    }
    return out;
}

} // namespace pronykit
