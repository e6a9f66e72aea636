#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "pronykit/bench.hpp"
#include "pronykit/divided_diff.hpp"
#include "pronykit/fourier.hpp"
#include "pronykit/json_io.hpp"
#include "pronykit/prony_solve.hpp"
#include "pronykit/solvability.hpp"
#include "pronykit/stability.hpp"

namespace pronykit
{

namespace
{

/// Carries an error report up to run_cli.
struct CliFailure
{
    ErrorCode code;
    std::string message;
    Json extra = Json::object();
};

struct Options
{
    std::string input;
    std::string output;
    std::optional<std::uint64_t> seed;
    std::string mode = "full";
    int d = -1;
    int K = 1;
    double J = 0.0;
    double R = 1.0;
    int M = 0;
    int moments = 0;
    int trials = -1;
    int points = 1024;
    int forced_rank = -1;
    double eps = 1e-8;
    double noise_R = 0.0;
    std::string reference;
    std::vector<int> M_grid;
    std::vector<double> h_grid{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    double rank_tol = kDefaultRankTol;
    double cluster_tol = 1e-6;
    bool json_errors = true;
};

Json read_json(const std::string& path)
{
    if (path.empty())
        throw Error(ErrorCode::InvalidInput, "--input is required");
    try
    {
        if (path == "-")
            return Json::parse(std::cin);
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::InvalidInput, "cannot open " + path);
        return Json::parse(in);
    }
    catch (const Json::exception& e)
    {
        throw Error(ErrorCode::InvalidInput, std::string("malformed JSON: ") + e.what());
    }
}

void write_text(const Options& o, std::ostream& out, const std::string& text)
{
    if (o.output.empty() || o.output == "-")
    {
        out << text;
        return;
    }
    std::ofstream f(o.output);
    if (!f)
        throw Error(ErrorCode::InvalidInput, "cannot write " + o.output);
    f << text;
}

void write_json(const Options& o, std::ostream& out, const Json& j)
{
    write_text(o, out, j.dump(2) + "\n");
}

std::uint64_t require_seed(const Options& o)
{
    if (!o.seed)
        throw Error(ErrorCode::InvalidInput, "--seed is required for randomized tasks");
    return *o.seed;
}

ReconstructMode parse_mode(const std::string& s)
{
    if (s == "half")
        return ReconstructMode::Half;
    if (s == "full")
        return ReconstructMode::Full;
    throw Error(ErrorCode::InvalidInput, "--mode must be half or full");
}

void cmd_solve(const Options& o, std::ostream& out)
{
    const MomentSequence mu = moments_from_json(read_json(o.input));
    const SolvabilityReport rep = classify(mu, o.rank_tol);
    if (!rep.solvable)
        throw CliFailure{ErrorCode::Unsolvable,
                         "moment data lies in the unsolvable stratum of rank " + std::to_string(rep.rank),
                         Json{{"report", to_json(rep)}}};
    SolveOptions opts;
    opts.rank_tol = o.rank_tol;
    opts.cluster_tol = o.cluster_tol;
    if (o.forced_rank >= 0)
        opts.forced_rank = o.forced_rank;
    const PronySolution sol = solve_prony(mu, opts);
    write_json(o, out,
               Json{{"signal", to_json(sol.signal)},
                    {"residual", sol.residual},
                    {"rank", sol.report.rank},
                    {"stratum", to_json(sol.report)["stratum"]},
                    {"report", to_json(sol.report)}});
}

void cmd_classify(const Options& o, std::ostream& out)
{
    const MomentSequence mu = moments_from_json(read_json(o.input));
    write_json(o, out, to_json(classify(mu, o.rank_tol)));
}

void cmd_dd_solve(const Options& o, std::ostream& out)
{
    const MomentSequence mu = moments_from_json(read_json(o.input));
    DDSolveOptions opts;
    opts.rank_tol = o.rank_tol;
    const DDSolution sol = solve_prony_dd(mu, opts);
    Json j = to_json(sol);
    j["signal"] = to_json(dd_to_standard(sol));
    write_json(o, out, j);
}

void cmd_bounds(const Options& o, std::ostream& out)
{
    const SpikeSignal f = signal_from_json(read_json(o.input));
    if (o.trials > 0)
    {
        write_json(o, out, to_json(validate_bounds(f, o.eps, o.trials, require_seed(o))));
        return;
    }
    write_json(o, out, Json{{"bounds", to_json(stability_bounds(f, o.eps))}});
}

void cmd_synth(const Options& o, std::ostream& out)
{
    const Json in = read_json(o.input);
    if (in.is_object() && in.contains("nodes"))
    {
        const SpikeSignal f = signal_from_json(in);
        const int n = o.moments > 0 ? o.moments : static_cast<int>(2 * f.order());
        write_json(o, out, to_json(prony_mapping(f, std::max(n, 2))));
        return;
    }
    const PiecewiseModel model = model_from_json(in);
    if (o.M < 1)
        throw Error(ErrorCode::InvalidInput, "--M must be >= 1 (3M coefficients are written)");
    std::optional<EnvelopeNoise> noise;
    if (o.noise_R > 0.0)
        noise = EnvelopeNoise{o.noise_R, o.d >= 0 ? o.d : std::max(model.order(), 0), require_seed(o)};
    FourierData data = synthesize_fourier(model, 3 * o.M, noise);
    data.M = o.M;
    if (!noise)
        data.R = o.R;
    write_json(o, out, to_json(data));
}

void cmd_reconstruct(const Options& o, std::ostream& out)
{
    const FourierData data = fourier_from_json(read_json(o.input));
    if (o.d < 0)
        throw Error(ErrorCode::InvalidInput, "--d is required");
    ReconstructParams p;
    p.d = o.d;
    p.K = o.K;
    p.J = o.J > 0.0 ? o.J : (o.K <= 1 ? M_PI : 2.0);
    p.R = data.R;
    const Reconstruction rec = reconstruct(data, p, parse_mode(o.mode));
    Json details = Json::array();
    for (const auto& e : rec.details)
        details.push_back(to_json(e));
    write_json(o, out,
               Json{{"model", to_json(rec.estimate)},
                    {"details", details},
                    {"initial_jumps", rec.initial_jumps}});
}

std::string csv_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void cmd_sample(const Options& o, std::ostream& out)
{
    Json in = read_json(o.input);
    // Accept the output of `reconstruct` directly.
    if (in.is_object() && in.contains("model"))
        in = in.at("model");
    const PiecewiseModel model = model_from_json(in);
    std::optional<PiecewiseModel> ref;
    if (!o.reference.empty())
    {
        Json r = read_json(o.reference);
        if (r.is_object() && r.contains("model"))
            r = r.at("model");
        ref = model_from_json(r);
    }
    if (o.points < 1)
        throw Error(ErrorCode::InvalidInput, "--points must be >= 1");
    std::ostringstream csv;
    csv << (ref ? "x,value,residual\n" : "x,value\n");
    for (int i = 0; i < o.points; ++i)
    {
        const double x = -M_PI + 2.0 * M_PI * i / o.points;
        const double v = model_eval(model, x);
        csv << csv_number(x) << ',' << csv_number(v);
        if (ref)
            csv << ',' << csv_number(v - model_eval(*ref, x));
        csv << '\n';
    }
    write_text(o, out, csv.str());
}

void cmd_bench_collision(const Options& o, std::ostream& out)
{
    if (o.h_grid.empty())
        throw Error(ErrorCode::InvalidInput, "--h-grid must not be empty");
    write_json(o, out, to_json(bench_collision(o.h_grid)));
}

void cmd_bench_fourier(const Options& o, std::ostream& out)
{
    if (o.M_grid.empty())
        throw Error(ErrorCode::InvalidInput, "--M-grid must not be empty");
    FourierBenchConfig cfg;
    cfg.d = o.d >= 0 ? o.d : 1;
    cfg.K = o.K;
    cfg.M_grid = o.M_grid;
    cfg.trials = o.trials > 0 ? o.trials : 5;
    cfg.seed = require_seed(o);
    cfg.mode = parse_mode(o.mode);
    cfg.R = o.R;
    cfg.J = o.J;
    Json j = to_json(bench_fourier(cfg));
    j["config"] = Json{{"d", cfg.d},         {"K", cfg.K},       {"trials", cfg.trials},
                       {"seed", cfg.seed},   {"mode", o.mode},   {"R", cfg.R}};
    write_json(o, out, j);
}

int exit_code_for(ErrorCode c)
{
    switch (c)
    {
        case ErrorCode::InvalidInput:
            return kExitInvalid;
        case ErrorCode::Unsolvable:
            return kExitUnsolvable;
        default:
            return kExitNumerical;
    }
}

void report(std::ostream& err, bool as_json, ErrorCode code, const std::string& message,
            const Json& extra = Json::object())
{
    if (as_json)
    {
        Json j{{"error", Json{{"code", std::string(to_string(code))}, {"message", message}}}};
        for (auto it = extra.begin(); it != extra.end(); ++it)
            j["error"][it.key()] = it.value();
        err << j.dump() << "\n";
    }
    else
    {
        err << "pronykit: " << to_string(code) << ": " << message << "\n";
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Prony systems and Fourier reconstruction of piecewise-smooth functions"};
    app.require_subcommand(1);
    app.add_flag("--json-errors,!--no-json-errors", o.json_errors,
                 "Report errors on stderr as JSON (default) or plain text");

    auto add_io = [&](CLI::App* sub) {
        sub->add_option("--input", o.input, "Input JSON file ('-' for stdin)");
        sub->add_option("--output", o.output, "Output file (default stdout)");
    };
    auto add_tols = [&](CLI::App* sub) {
        sub->add_option("--rank-tol", o.rank_tol, "Relative singular value threshold");
        sub->add_option("--cluster-tol", o.cluster_tol, "Relative root clustering tolerance");
    };

    auto* solve = app.add_subcommand("solve", "Invert the Prony mapping for a moment sequence");
    add_io(solve);
    add_tols(solve);
    solve->add_option("--rank", o.forced_rank, "Force the Hankel rank (noisy data)");

    auto* cls = app.add_subcommand("classify", "Hankel rank and solvability stratum");
    add_io(cls);
    add_tols(cls);

    auto* dd = app.add_subcommand("dd-solve", "Solve in the divided-difference basis");
    add_io(dd);
    add_tols(dd);

    auto* bounds = app.add_subcommand("bounds", "Perturbation bounds, optionally Monte Carlo checked");
    add_io(bounds);
    bounds->add_option("--eps", o.eps, "Moment perturbation size");
    bounds->add_option("--trials", o.trials, "Monte Carlo trials (0: bounds only)");
    bounds->add_option("--seed", o.seed, "Random seed");

    auto* synth = app.add_subcommand("synth", "Moments of a signal or Fourier data of a model");
    add_io(synth);
    synth->add_option("--moments", o.moments, "Number of moments (default 2 x order)");
    synth->add_option("--M", o.M, "Reconstruction budget; 3M coefficients are written");
    synth->add_option("--R", o.R, "Decay constant recorded with the data");
    synth->add_option("--noise-R", o.noise_R, "Add envelope noise of this size");
    synth->add_option("--d", o.d, "Envelope order for the noise (default model order)");
    synth->add_option("--seed", o.seed, "Random seed");

    auto* rec = app.add_subcommand("reconstruct", "Recover jumps and magnitudes from Fourier data");
    add_io(rec);
    rec->add_option("--d", o.d, "Smoothness order d");
    rec->add_option("--K", o.K, "Number of jumps");
    rec->add_option("--J", o.J, "Bump half-width (default pi for one jump, else 2)");
    rec->add_option("--mode", o.mode, "half or full");

    auto* sample = app.add_subcommand("sample", "Evaluate a model on a uniform grid as CSV");
    add_io(sample);
    sample->add_option("--points", o.points, "Grid size on [-pi, pi)");
    sample->add_option("--reference", o.reference, "Reference model for a residual column");

    auto* bc = app.add_subcommand("bench-collision", "Collision family in both bases");
    bc->add_option("--output", o.output, "Output file (default stdout)");
    bc->add_option("--h-grid", o.h_grid, "Comma-separated h values")->delimiter(',');

    auto* bf = app.add_subcommand("bench-fourier", "Convergence rates of the Fourier reconstruction");
    bf->add_option("--output", o.output, "Output file (default stdout)");
    bf->add_option("--d", o.d, "Smoothness order d");
    bf->add_option("--K", o.K, "Number of jumps");
    bf->add_option("--M-grid", o.M_grid, "Comma-separated M values")->delimiter(',');
    bf->add_option("--trials", o.trials, "Trials per M (default 5)");
    bf->add_option("--seed", o.seed, "Random seed");
    bf->add_option("--mode", o.mode, "half or full");
    bf->add_option("--R", o.R, "Envelope of the smooth part");
    bf->add_option("--J", o.J, "Bump half-width (default from the jump layout)");

    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return kExitOk;
    }
    catch (const CLI::CallForAllHelp&)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    }
    catch (const CLI::ParseError& e)
    {
        report(err, o.json_errors, ErrorCode::InvalidInput, e.what());
        return kExitInvalid;
    }

    try
    {
        if (*solve)
            cmd_solve(o, out);
        else if (*cls)
            cmd_classify(o, out);
        else if (*dd)
            cmd_dd_solve(o, out);
        else if (*bounds)
            cmd_bounds(o, out);
        else if (*synth)
            cmd_synth(o, out);
        else if (*rec)
            cmd_reconstruct(o, out);
        else if (*sample)
            cmd_sample(o, out);
        else if (*bc)
            cmd_bench_collision(o, out);
        else if (*bf)
            cmd_bench_fourier(o, out);
    }
    catch (const CliFailure& f)
    {
        report(err, o.json_errors, f.code, f.message, f.extra);
        return exit_code_for(f.code);
    }
    catch (const Error& e)
    {
        report(err, o.json_errors, e.code(), e.what());
        return exit_code_for(e.code());
    }
    return kExitOk;
}

} // namespace pronykit
