#include "pronykit/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pronykit/divided_diff.hpp"
#include "pronykit/parallel.hpp"
#include "pronykit/prony_solve.hpp"

namespace pronykit
{

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
        if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i]))
        {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    SlopeFit fit;
    fit.points = static_cast<int>(lx.size());
    if (fit.points < 4)
    {
        fit.slope = std::numeric_limits<double>::quiet_NaN();
        fit.stderr_ = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    const double n = fit.points;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        mx += lx[i] / n;
        my += ly[i] / n;
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    fit.slope = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        const double r = ly[i] - my - fit.slope * (lx[i] - mx);
        ssr += r * r;
    }
    fit.stderr_ = std::sqrt(ssr / (n - 2.0) / sxx);
    fit.valid = true;
    return fit;
}

void fit_slopes(ConvergenceTable& table, int discard_smallest)
{
    std::vector<const ConvergenceRow*> rows;
    for (const auto& r : table.rows)
        rows.push_back(&r);
    std::sort(rows.begin(), rows.end(),
              [](const ConvergenceRow* a, const ConvergenceRow* b) { return a->x < b->x; });
    const auto skip = static_cast<std::size_t>(std::max(discard_smallest, 0));
    table.slopes.clear();
    for (std::size_t m = 0; m < table.metrics.size(); ++m)
    {
        std::vector<double> xs, ys;
        for (std::size_t i = skip; i < rows.size(); ++i)
            if (rows[i]->ok)
            {
                xs.push_back(rows[i]->x);
                ys.push_back(rows[i]->values[m]);
            }
        table.slopes.push_back(fit_loglog(xs, ys));
    }
}

ConvergenceTable bench_collision(std::span<const double> h_grid, Complex tau)
{
    ConvergenceTable table;
    table.x_label = "h";
    table.metrics = {"max_abs_a", "max_abs_beta", "node_error", "residual"};
    const double nan = std::numeric_limits<double>::quiet_NaN();

    for (double h : h_grid)
    {
        ConvergenceRow row;
        row.x = h;
        row.values.assign(table.metrics.size(), nan);
        try
        {
            if (!(h > 0.0))
                throw Error(ErrorCode::InvalidInput, "h must be positive");
            SpikeSignal f;
            f.nodes = {tau, tau + h};
            f.coeffs = {{-1.0 / h}, {1.0 / h}};
            const MomentSequence mu = prony_mapping(f, 4);

            // Standard basis: the two computed roots kept as distinct nodes.
            const Polynomial Q = prony_denominator(mu.values, 2);
            std::vector<Complex> roots = polynomial_roots(Q);
            std::sort(roots.begin(), roots.end(),
                      [](Complex a, Complex b) { return a.real() < b.real(); });
            const std::vector<int> ones{1, 1};
            const CVector a = solve_coefficient_system(roots, ones, {mu.values.data(), 2});
            row.values[0] = a.cwiseAbs().maxCoeff();
            row.values[2] = std::max(std::abs(roots[0] - f.nodes[0]), std::abs(roots[1] - f.nodes[1]));

            const DDSolution dd = solve_prony_dd(mu);
            double bmax = 0.0;
            for (const auto& b : dd.beta)
                bmax = std::max(bmax, std::abs(b));
            row.values[1] = bmax;
            row.values[3] = dd.residual;
            row.successes = 1;
        }
        catch (const Error& e)
        {
            row.ok = false;
            row.failures.push_back(std::string(to_string(e.code())) + ": " + e.what());
        }
        table.rows.push_back(std::move(row));
    }
    fit_slopes(table, 0);
    return table;
}

namespace
{

// Just under the minimal separation of the jumps drawn by bench_model.
double default_J(int K)
{
    if (K <= 1)
        return M_PI;
    if (K == 2)
        return 0.95 * (M_PI - 0.3);
    return 0.95 * (2.0 * M_PI / K - 0.6);
}

std::mt19937_64 trial_rng(std::uint64_t seed, int trial, std::uint32_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), stream};
    return std::mt19937_64(seq);
}

double median(std::vector<double> v)
{
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct TrialOutcome
{
    bool ok = false;
    double jump = 0.0;
    double a0 = 0.0;
    double pointwise = 0.0;
    std::string failure;
};

} // namespace

PiecewiseModel bench_model(const FourierBenchConfig& cfg, int trial, int smooth_len)
{
    std::mt19937_64 rng = trial_rng(cfg.seed, trial, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PiecewiseModel model;
    const double xi1 = wrap_angle(2.0 * M_PI * unit(rng));
    for (int j = 0; j < cfg.K; ++j)
    {
        const double jitter = j == 0 ? 0.0 : (unit(rng) < 0.5 ? -0.3 : 0.3);
        model.jumps.push_back(wrap_angle(xi1 + 2.0 * M_PI * j / cfg.K + jitter));
        std::vector<double> mags;
        const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
        mags.push_back(sign * (cfg.B + (cfg.A - cfg.B) * unit(rng)));
        for (int l = 1; l <= cfg.d; ++l)
            mags.push_back(cfg.A * (2.0 * unit(rng) - 1.0));
        model.magnitudes.push_back(std::move(mags));
    }
    std::uniform_int_distribution<std::uint64_t> draw;
    model.smooth = envelope_smooth_part(smooth_len, cfg.d, cfg.R, draw(rng));
    return model;
}

ConvergenceTable bench_fourier(const FourierBenchConfig& cfg)
{
    if (cfg.M_grid.empty())
        throw Error(ErrorCode::InvalidInput, "bench_fourier: empty M grid");
    if (cfg.trials < 1 || cfg.d < 0 || cfg.K < 1)
        throw Error(ErrorCode::InvalidInput, "bench_fourier: need trials >= 1, d >= 0, K >= 1");

    ConvergenceTable table;
    table.x_label = "M";
    table.metrics = {"jump_error", "a0_error", "pointwise_error"};
    const int M_max = *std::max_element(cfg.M_grid.begin(), cfg.M_grid.end());
    const int L = 3 * M_max;

    ReconstructParams params;
    params.d = cfg.d;
    params.K = cfg.K;
    params.J = cfg.J > 0.0 ? cfg.J : default_J(cfg.K);
    params.A = cfg.A;
    params.B = cfg.B;
    params.R = cfg.R;

    // Per trial: model, full coefficient set, and the true function on the
    // jump-free window.
    struct TrialData
    {
        PiecewiseModel model;
        FourierData data;
        std::vector<double> xs;
        std::vector<double> truth;
    };
    std::vector<TrialData> trials(static_cast<std::size_t>(cfg.trials));
    parallel_for(trials.size(), [&](std::size_t t) {
        TrialData& td = trials[t];
        td.model = bench_model(cfg, static_cast<int>(t), L);
        td.data = synthesize_fourier(td.model, L);
        for (int p = 0; p < cfg.window_points; ++p)
        {
            const double x = -M_PI + 2.0 * M_PI * (p + 0.5) / cfg.window_points;
            bool far = true;
            for (double xi : td.model.jumps)
                far = far && std::abs(wrap_angle(x - xi)) >= 0.5;
            if (!far)
                continue;
            td.xs.push_back(x);
            td.truth.push_back(model_eval(td.model, x));
        }
    });

    const std::size_t nM = cfg.M_grid.size();
    std::vector<TrialOutcome> outcomes(nM * trials.size());
    parallel_for(outcomes.size(), [&](std::size_t idx) {
        const std::size_t mi = idx / trials.size();
        const TrialData& td = trials[idx % trials.size()];
        const int M = cfg.M_grid[mi];
        TrialOutcome& out = outcomes[idx];
        try
        {
            FourierData data;
            data.M = M;
            data.R = cfg.R;
            data.coeffs.assign(td.data.coeffs.begin(), td.data.coeffs.begin() + 3 * M + 1);
            const Reconstruction rec = reconstruct(data, params, cfg.mode);
            const PiecewiseModel& est = rec.estimate;
            if (est.jumps.size() != td.model.jumps.size())
                throw Error(ErrorCode::PronyFailure, "wrong number of jumps");
            // Match every true jump to the nearest estimate.
            for (std::size_t j = 0; j < td.model.jumps.size(); ++j)
            {
                std::size_t best = 0;
                double dist = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < est.jumps.size(); ++i)
                {
                    const double e = std::abs(wrap_angle(est.jumps[i] - td.model.jumps[j]));
                    if (e < dist)
                    {
                        dist = e;
                        best = i;
                    }
                }
                out.jump = std::max(out.jump, dist);
                out.a0 = std::max(out.a0, std::abs(est.magnitudes[best][0] - td.model.magnitudes[j][0]));
            }
            for (std::size_t p = 0; p < td.xs.size(); ++p)
                out.pointwise = std::max(out.pointwise, std::abs(model_eval(est, td.xs[p]) - td.truth[p]));
            out.ok = true;
        }
        catch (const Error& e)
        {
            out.failure = "trial " + std::to_string(idx % trials.size()) + ", " +
                          std::string(to_string(e.code())) + ": " + e.what();
        }
    });

    for (std::size_t mi = 0; mi < nM; ++mi)
    {
        ConvergenceRow row;
        row.x = cfg.M_grid[mi];
        std::vector<double> jump, a0, pw;
        for (std::size_t t = 0; t < trials.size(); ++t)
        {
            const TrialOutcome& o = outcomes[mi * trials.size() + t];
            if (!o.ok)
            {
                row.failures.push_back(o.failure);
                continue;
            }
            jump.push_back(o.jump);
            a0.push_back(o.a0);
            pw.push_back(o.pointwise);
        }
        row.successes = static_cast<int>(jump.size());
        row.ok = 2 * row.successes > cfg.trials;
        row.values = {median(jump), median(a0), median(pw)};
        table.rows.push_back(std::move(row));
    }
    fit_slopes(table, 2);
    return table;
}

} // namespace pronykit
