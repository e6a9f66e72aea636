#ifndef PRONYKIT_BENCH_HPP
#define PRONYKIT_BENCH_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pronykit/fourier.hpp"

namespace pronykit
{

struct ConvergenceRow
{
    double x = 0.0;
    std::vector<double> values; // one per metric
    bool ok = true;
    int successes = 0;
    std::vector<std::string> failures;
};

/// Least-squares fit of log(value) against log(x).
struct SlopeFit
{
    double slope = 0.0;
    double stderr_ = 0.0;
    int points = 0;
    bool valid = false; // needs at least 4 usable rows
};

struct ConvergenceTable
{
    std::string x_label;
    std::vector<std::string> metrics;
    std::vector<ConvergenceRow> rows;
    std::vector<SlopeFit> slopes; // per metric
};

/// Fits log y = c + slope log x over the points with positive finite x and y.
SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Fills table.slopes from the rows that succeeded, after dropping the
/// `discard_smallest` rows with the smallest x.
void fit_slopes(ConvergenceTable& table, int discard_smallest);

/// Two-node collision family F_h = (delta(x - tau - h) - delta(x - tau)) / h,
/// solved in the standard basis (exact two-node structure) and in the
/// divided-difference basis. Metrics: max_abs_a, max_abs_beta, node_error,
/// residual. Slopes use every row.
ConvergenceTable bench_collision(std::span<const double> h_grid, Complex tau = 0.3);

struct FourierBenchConfig
{
    int d = 1;
    int K = 1;
    std::vector<int> M_grid;
    int trials = 5;
    std::uint64_t seed = 1;
    ReconstructMode mode = ReconstructMode::Full;
    double R = 1.0;     // envelope of the smooth part
    double A = 1.0;     // magnitude bound
    double B = 0.5;     // lower bound on |a_0|
    double J = 0.0;     // bump half-width; 0 picks pi (K = 1) or 0.95 x min separation
    int window_points = 200;
};

/// Per-trial random models (jumps, magnitudes, envelope-saturating smooth
/// part), reconstructed at every M. Metrics are medians over successful
/// trials: jump_error, a0_error, pointwise_error (on points at distance >=
/// 0.5 from every jump). Slopes drop the two smallest M.
ConvergenceTable bench_fourier(const FourierBenchConfig& cfg);

/// Random test model used by bench_fourier for one trial.
PiecewiseModel bench_model(const FourierBenchConfig& cfg, int trial, int smooth_len);

} // namespace pronykit

#endif
