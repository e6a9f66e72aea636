#include "pronykit/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>

#include <fftw3.h>

#include "pronykit/prony_core.hpp"
#include "pronykit/prony_solve.hpp"

namespace pronykit
{

namespace
{

constexpr double kTwoPi = 2.0 * M_PI;
const Complex kI(0.0, 1.0);

double binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

double factorial(int n)
{
    double r = 1.0;
    for (int i = 2; i <= n; ++i)
        r *= i;
    return r;
}

std::vector<double> bernoulli_numbers(int n)
{
    std::vector<double> b(static_cast<std::size_t>(n + 1), 0.0);
    b[0] = 1.0;
    for (int m = 1; m <= n; ++m)
    {
        double s = 0.0;
        for (int k = 0; k < m; ++k)
            s += binomial(m + 1, k) * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(m)] = -s / (m + 1);
    }
    return b;
}

Complex ipow_i(int n)
{
    switch (((n % 4) + 4) % 4)
    {
        case 0:
            return {1.0, 0.0};
        case 1:
            return {0.0, 1.0};
        case 2:
            return {-1.0, 0.0};
        default:
            return {0.0, -1.0};
    }
}

struct SelectedRoot
{
    Complex z;
    double residual = 0.0;
};

// Roots of sum_i c_i u^i, one picked by the selection rule.
SelectedRoot select_root(const std::vector<Complex>& coeffs, RootSelection how)
{
    const Complex lead = coeffs.back();
    if (lead == Complex(0.0))
        throw Error(ErrorCode::NoRootNearCircle, "elimination polynomial has vanishing leading coefficient");
    std::vector<Complex> monic(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        monic[i] = coeffs[i] / lead;
    const std::vector<Complex> roots = polynomial_roots(monic);
    const std::vector<Complex> dp = poly_derivative(monic);

    std::size_t best = 0;
    if (how == RootSelection::NearestCircle)
    {
        double best_dist = std::numeric_limits<double>::infinity();
        double best_slope = 0.0;
        for (std::size_t i = 0; i < roots.size(); ++i)
        {
            const double dist = std::abs(1.0 - std::abs(roots[i]));
            const double slope = std::abs(poly_eval(dp, roots[i]));
            if (dist < best_dist || (dist == best_dist && slope > best_slope))
            {
                best = i;
                best_dist = dist;
                best_slope = slope;
            }
        }
    }
    const Complex z = roots[best];
    if (std::abs(1.0 - std::abs(z)) > 0.5)
        throw Error(ErrorCode::NoRootNearCircle,
                    "no root of the elimination polynomial within 0.5 of the unit circle");
    double cmax = 0.0;
    for (const auto& c : coeffs)
        cmax = std::max(cmax, std::abs(c));
    return {z, std::abs(poly_eval(coeffs, z)) / cmax};
}

// Solves sum_i x_i t_j^i = rhs_j for the given abscissae (small systems).
CVector solve_vandermonde(const std::vector<double>& t, const CVector& rhs)
{
    const auto n = static_cast<Eigen::Index>(t.size());
    CMatrix V(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            V(j, i) = std::pow(t[static_cast<std::size_t>(j)], static_cast<double>(i));
    Eigen::FullPivLU<CMatrix> lu(V);
    CVector x = lu.solve(rhs);
    x += lu.solve(rhs - V * x);
    return x;
}

} // namespace

int PiecewiseModel::order() const
{
    int d = -1;
    for (const auto& m : magnitudes)
        d = std::max(d, static_cast<int>(m.size()) - 1);
    return d;
}

double bernoulli_poly(int n, double x)
{
    if (n < 0)
        throw Error(ErrorCode::InvalidInput, "bernoulli_poly: n must be nonnegative");
    const auto b = bernoulli_numbers(n);
    double acc = 0.0;
    // Horner in x over sum_k C(n,k) B_k x^{n-k}
    for (int p = 0; p <= n; ++p)
        acc = acc * x + binomial(n, p) * b[static_cast<std::size_t>(p)];
    return acc;
}

double wrap_angle(double x)
{
    double y = std::fmod(x + M_PI, kTwoPi);
    if (y < 0.0)
        y += kTwoPi;
    const double r = y - M_PI;
    return r >= M_PI ? -M_PI : r;
}

double phi_eval(const PiecewiseModel& model, double x)
{
    double acc = 0.0;
    for (std::size_t j = 0; j < model.jumps.size(); ++j)
    {
        double y = std::fmod(x - model.jumps[j], kTwoPi);
        if (y < 0.0)
            y += kTwoPi;
        const double t = y / kTwoPi;
        for (std::size_t l = 0; l < model.magnitudes[j].size(); ++l)
        {
            const int n = static_cast<int>(l);
            const double v = -std::pow(kTwoPi, n) / factorial(n + 1) * bernoulli_poly(n + 1, t);
            acc += model.magnitudes[j][l] * v;
        }
    }
    return acc;
}

Complex psi_eval(const PiecewiseModel& model, double x)
{
    if (model.smooth.empty())
        return 0.0;
    Complex acc = model.smooth[0];
    for (std::size_t k = 1; k < model.smooth.size(); ++k)
    {
        const Complex e = std::polar(1.0, static_cast<double>(k) * x);
        acc += model.smooth[k] * e + std::conj(model.smooth[k]) * std::conj(e);
    }
    return acc;
}

double model_eval(const PiecewiseModel& model, double x)
{
    return phi_eval(model, x) + psi_eval(model, x).real();
}

Complex phi_fourier(const PiecewiseModel& model, int k)
{
    if (k == 0)
        throw Error(ErrorCode::InvalidInput, "phi_fourier: k = 0 is fixed by c_0(Phi) = 0");
    const Complex ik = kI * static_cast<double>(k);
    Complex acc(0.0);
    for (std::size_t j = 0; j < model.jumps.size(); ++j)
    {
        Complex inner(0.0);
        Complex p = 1.0 / ik;
        for (double a : model.magnitudes[j])
        {
            inner += p * a;
            p /= ik;
        }
        acc += std::polar(1.0, -static_cast<double>(k) * model.jumps[j]) * inner;
    }
    return acc / kTwoPi;
}

FourierData synthesize_fourier(const PiecewiseModel& model, int M_total,
                               const std::optional<EnvelopeNoise>& noise)
{
    if (M_total < 0)
        throw Error(ErrorCode::InvalidInput, "synthesize_fourier: M_total must be >= 0");
    FourierData data;
    data.coeffs.assign(static_cast<std::size_t>(M_total + 1), Complex(0.0));
    data.M = M_total / 3;
    data.R = noise ? noise->R : 0.0;
    for (int k = 0; k <= M_total; ++k)
    {
        Complex c = k == 0 ? Complex(0.0) : phi_fourier(model, k);
        if (static_cast<std::size_t>(k) < model.smooth.size())
            c += model.smooth[static_cast<std::size_t>(k)];
        data.coeffs[static_cast<std::size_t>(k)] = c;
    }
    if (noise)
    {
        std::mt19937_64 rng(noise->seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int k = 1; k <= M_total; ++k)
        {
            const double radius = noise->R * std::pow(static_cast<double>(k), -noise->d - 2.0);
            const double rad = radius * std::sqrt(unit(rng));
            const double ang = kTwoPi * unit(rng);
            data.coeffs[static_cast<std::size_t>(k)] += std::polar(rad, ang);
        }
    }
    return data;
}

std::vector<Complex> envelope_smooth_part(int L, int d, double R, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Complex> c(static_cast<std::size_t>(std::max(L, 0) + 1), Complex(0.0));
    c[0] = R * (2.0 * unit(rng) - 1.0);
    for (int k = 1; k <= L; ++k)
    {
        const double env = R * std::pow(static_cast<double>(k), -d - 2.0);
        c[static_cast<std::size_t>(k)] = std::polar(env * std::sqrt(unit(rng)), kTwoPi * unit(rng));
    }
    return c;
}

Complex scaled_sample(const FourierData& data, int k, int power)
{
    if (k < 1 || k > data.total())
        throw Error(ErrorCode::InvalidInput, "scaled_sample: coefficient index out of range");
    const Complex ik = kI * static_cast<double>(k);
    return kTwoPi * std::pow(ik, power) * data.coeffs[static_cast<std::size_t>(k)];
}

std::vector<double> prony_order0_jumps(const FourierData& data, int K)
{
    if (K < 1)
        throw Error(ErrorCode::InvalidInput, "prony_order0_jumps: K must be >= 1");
    const int k0 = data.M - 2 * K + 1;
    if (k0 < 1 || data.M > data.total())
        throw Error(ErrorCode::PronyFailure, "prony_order0_jumps: M too small for K jumps");
    std::vector<Complex> s(static_cast<std::size_t>(2 * K));
    for (int n = 0; n < 2 * K; ++n)
        s[static_cast<std::size_t>(n)] = scaled_sample(data, k0 + n, 1);

    std::vector<double> xi;
    try
    {
        const Polynomial Q = prony_denominator(s, K);
        for (const auto& w : polynomial_roots(Q))
            xi.push_back(wrap_angle(-std::arg(w)));
    }
    catch (const Error& e)
    {
        throw Error(ErrorCode::PronyFailure,
                    std::string("prony_order0_jumps: ") + e.what() + "; try a larger M");
    }
    std::sort(xi.begin(), xi.end());
    return xi;
}

double bump_eval(double J, double x)
{
    const double Je = std::min(J, M_PI);
    const double a = std::abs(wrap_angle(x));
    const double inner = Je / 3.0;
    if (a <= inner)
        return 1.0;
    if (a >= Je)
        return 0.0;
    const double t = (a - inner) / (Je - inner);
    const auto g = [](double u) { return u <= 0.0 ? 0.0 : std::exp(-1.0 / u); };
    const double up = g(1.0 - t);
    return up / (up + g(t));
}

std::vector<double> bump_coefficients(double J, int max_m)
{
    static std::mutex mutex;
    static std::map<std::pair<double, int>, std::vector<double>> cache;

    int n = 1 << 16;
    while (n < 4 * (max_m + 1))
        n <<= 1;

    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(J, n);
    auto it = cache.find(key);
    if (it == cache.end())
    {
        // Trapezoid rule on the periodic grid x_p = 2 pi p / n, computed as one
        // real-to-complex FFT.
        double* in = fftw_alloc_real(static_cast<std::size_t>(n));
        fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
        fftw_plan plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
        for (int p = 0; p < n; ++p)
            in[p] = bump_eval(J, kTwoPi * p / n);
        fftw_execute(plan);
        std::vector<double> c(static_cast<std::size_t>(n / 2 + 1));
        for (int m = 0; m <= n / 2; ++m)
            c[static_cast<std::size_t>(m)] = out[m][0] / n;
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
        it = cache.emplace(key, std::move(c)).first;
    }
    return {it->second.begin(), it->second.begin() + max_m + 1};
}

FourierData localize_jump(const FourierData& data, double xi, double J)
{
    const int M = data.M;
    const int L = std::min(3 * M, data.total());
    if (M < 0 || L < M)
        throw Error(ErrorCode::InvalidInput, "localize_jump: need at least M coefficients");
    const std::vector<double> hb = bump_coefficients(J, M + L);

    // c_m(h) = e^{-i m xi} c_m(b), with c_m(b) real and even in m.
    auto h = [&](int m) {
        return std::polar(hb[static_cast<std::size_t>(std::abs(m))], -static_cast<double>(m) * xi);
    };
    auto f = [&](int l) {
        const Complex c = data.coeffs[static_cast<std::size_t>(std::abs(l))];
        return l >= 0 ? c : std::conj(c);
    };

    FourierData out;
    out.M = M;
    out.R = data.R;
    out.coeffs.assign(static_cast<std::size_t>(M + 1), Complex(0.0));
    for (int k = 0; k <= M; ++k)
    {
        Complex acc(0.0);
        for (int l = -L; l <= L; ++l)
            acc += f(l) * h(k - l);
        out.coeffs[static_cast<std::size_t>(k)] = acc;
    }
    out.coeffs[0] = out.coeffs[0].real();
    return out;
}

JumpEstimate halforder_single_jump(const FourierData& data, int d1, int M)
{
    if (d1 < 0 || M - d1 - 1 < 1 || M > data.total())
        throw Error(ErrorCode::InvalidInput, "halforder_single_jump: need samples k = M-d1-1..M");
    const int power = d1 + 1;
    std::vector<Complex> p(static_cast<std::size_t>(d1 + 2));
    for (int j = 0; j <= d1 + 1; ++j)
        p[static_cast<std::size_t>(j)] =
            (j % 2 == 0 ? 1.0 : -1.0) * binomial(d1 + 1, j) * scaled_sample(data, M - j, power);

    const SelectedRoot sel = select_root(p, RootSelection::NearestCircle);
    JumpEstimate est;
    est.root = sel.z;
    est.root_residual = sel.residual;
    est.xi = wrap_angle(-std::arg(sel.z));

    // m~_k e^{i k xi} = sum_j alpha_j k^j, fitted in t = k - M.
    std::vector<double> t;
    CVector rhs(d1 + 1);
    for (int i = 0; i <= d1; ++i)
    {
        const int k = M - d1 + i;
        t.push_back(static_cast<double>(k - M));
        rhs(i) = scaled_sample(data, k, power) * std::polar(1.0, static_cast<double>(k) * est.xi);
    }
    const CVector beta = solve_vandermonde(t, rhs);
    std::vector<Complex> alpha(static_cast<std::size_t>(d1 + 1), Complex(0.0));
    for (int i = 0; i <= d1; ++i)
        for (int j = 0; j <= i; ++j)
            alpha[static_cast<std::size_t>(j)] +=
                beta(i) * binomial(i, j) * std::pow(-static_cast<double>(M), i - j);

    est.magnitudes.assign(static_cast<std::size_t>(d1 + 1), 0.0);
    for (int j = 0; j <= d1; ++j)
        est.magnitudes[static_cast<std::size_t>(d1 - j)] =
            (alpha[static_cast<std::size_t>(j)] / ipow_i(j)).real();
    return est;
}

std::vector<Complex> decimated_polynomial(std::span<const Complex> mt, int d)
{
    if (d < 0 || mt.size() != static_cast<std::size_t>(d + 2))
        throw Error(ErrorCode::InvalidInput, "decimated_polynomial: need exactly d+2 measurements");
    std::vector<Complex> q(static_cast<std::size_t>(d + 2));
    for (int j = 0; j <= d + 1; ++j)
        q[static_cast<std::size_t>(d + 1 - j)] =
            (j % 2 == 0 ? 1.0 : -1.0) * binomial(d + 1, j) * mt[static_cast<std::size_t>(j)];
    return q;
}

JumpEstimate fullorder_single_jump(const FourierData& data, int d, int M, double prior_xi,
                                   const FullOrderOptions& opts)
{
    const int N = M / (d + 2);
    if (d < 0 || N < 1 || (d + 2) * N > data.total())
        throw Error(ErrorCode::InvalidInput, "fullorder_single_jump: need N = floor(M/(d+2)) >= 1");
    const int power = d + 1;
    std::vector<Complex> mt(static_cast<std::size_t>(d + 2));
    for (int j = 1; j <= d + 2; ++j)
        mt[static_cast<std::size_t>(j - 1)] = scaled_sample(data, j * N, power);

    const SelectedRoot sel = select_root(decimated_polynomial(mt, d), opts.selection);
    JumpEstimate est;
    est.root = sel.z;
    est.root_residual = sel.residual;

    // Branches: omega_n = e^{i (arg z + 2 pi n) / N}, xi_n = -(arg z + 2 pi n) / N.
    const double argz = std::arg(sel.z);
    const double spacing = kTwoPi / N;
    const double raw = (-prior_xi * N - argz) / kTwoPi;
    int n = static_cast<int>(std::llround(raw));
    const double xi_n = wrap_angle(-(argz + kTwoPi * n) / N);
    const double dist = std::abs(wrap_angle(xi_n - prior_xi));
    if (opts.prior_uncertainty && spacing - dist <= *opts.prior_uncertainty)
        throw Error(ErrorCode::BranchAmbiguity,
                    "fullorder_single_jump: two N-th root branches within the prior uncertainty");
    est.branch = ((n % N) + N) % N;
    est.xi = xi_n;

    // Magnitudes from m~_{jN} omega^{-jN} = sum_i gamma_i j^i, gamma_i = alpha_i N^i.
    std::vector<double> t;
    CVector rhs(d + 1);
    for (int j = 1; j <= d + 1; ++j)
    {
        t.push_back(static_cast<double>(j));
        rhs(j - 1) = mt[static_cast<std::size_t>(j - 1)] *
                     std::polar(1.0, static_cast<double>(j) * N * est.xi);
    }
    const CVector gamma = solve_vandermonde(t, rhs);
    est.magnitudes.assign(static_cast<std::size_t>(d + 1), 0.0);
    for (int i = 0; i <= d; ++i)
    {
        const Complex alpha = gamma(i) / std::pow(static_cast<double>(N), i);
        est.magnitudes[static_cast<std::size_t>(d - i)] = (alpha / ipow_i(i)).real();
    }
    return est;
}

Reconstruction reconstruct(const FourierData& data, const ReconstructParams& params,
                           ReconstructMode mode)
{
    if (params.d < 0 || params.K < 0)
        throw Error(ErrorCode::InvalidInput, "reconstruct: d and K must be nonnegative");
    if (data.total() < 3 * data.M)
        throw Error(ErrorCode::InvalidInput, "reconstruct: need 3M Fourier coefficients");

    Reconstruction rec;
    const int M = data.M;
    const int d1 = params.d / 2;
    if (params.K > 0)
        rec.initial_jumps = prony_order0_jumps(data, params.K);

    for (std::size_t j = 0; j < rec.initial_jumps.size(); ++j)
    {
        try
        {
            const FourierData local = localize_jump(data, rec.initial_jumps[j], params.J);
            JumpEstimate est = halforder_single_jump(local, d1, M);
            if (mode == ReconstructMode::Full)
                est = fullorder_single_jump(local, params.d, M, est.xi);
            rec.details.push_back(est);
        }
        catch (const Error& e)
        {
            throw Error(e.code(), "jump " + std::to_string(j) + ": " + e.what());
        }
    }

    PiecewiseModel& est = rec.estimate;
    for (const auto& jd : rec.details)
    {
        est.jumps.push_back(jd.xi);
        std::vector<double> mags(static_cast<std::size_t>(params.d + 1), 0.0);
        std::copy(jd.magnitudes.begin(), jd.magnitudes.end(), mags.begin());
        est.magnitudes.push_back(std::move(mags));
    }
    est.smooth.assign(static_cast<std::size_t>(M + 1), Complex(0.0));
    est.smooth[0] = data.coeffs[0].real();
    for (int k = 1; k <= M; ++k)
        est.smooth[static_cast<std::size_t>(k)] =
            data.coeffs[static_cast<std::size_t>(k)] - phi_fourier(est, k);
    return rec;
}

} // namespace pronykit
