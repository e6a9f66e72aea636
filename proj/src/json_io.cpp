#include "pronykit/json_io.hpp"

#include <cmath>

namespace pronykit
{

namespace
{

[[noreturn]] void bad(const std::string& what)
{
    throw Error(ErrorCode::InvalidInput, "json: " + what);
}

const Json& field(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        bad(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

double number(const Json& j, const char* what)
{
    if (!j.is_number())
        bad(std::string(what) + " must be a number");
    return j.get<double>();
}

Json complex_array(const std::vector<Complex>& v)
{
    Json a = Json::array();
    for (const auto& z : v)
        a.push_back(complex_to_json(z));
    return a;
}

std::vector<Complex> complex_array_from(const Json& j, const char* what)
{
    if (!j.is_array())
        bad(std::string(what) + " must be an array");
    std::vector<Complex> v;
    for (const auto& e : j)
        v.push_back(complex_from_json(e));
    return v;
}

const char* stratum_name(Stratum s)
{
    return s == Stratum::Solvable ? "sigma_r" : "sigma_prime_r";
}

} // namespace

Json complex_to_json(Complex z)
{
    return Json{{"re", z.real()}, {"im", z.imag()}};
}

Complex complex_from_json(const Json& j)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (!j.is_object())
        bad("complex value must be a number or {\"re\",\"im\"}");
    const double re = j.contains("re") ? number(j.at("re"), "re") : 0.0;
    const double im = j.contains("im") ? number(j.at("im"), "im") : 0.0;
    return {re, im};
}

Json to_json(const SpikeSignal& f)
{
    Json coeffs = Json::array();
    for (const auto& c : f.coeffs)
        coeffs.push_back(complex_array(c));
    return Json{{"nodes", complex_array(f.nodes)},
                {"multiplicities", f.multiplicities()},
                {"coeffs", coeffs}};
}

SpikeSignal signal_from_json(const Json& j)
{
    SpikeSignal f;
    f.nodes = complex_array_from(field(j, "nodes"), "nodes");
    const Json& coeffs = field(j, "coeffs");
    if (!coeffs.is_array())
        bad("coeffs must be an array of arrays");
    for (const auto& c : coeffs)
        f.coeffs.push_back(complex_array_from(c, "coeffs entry"));
    if (j.contains("multiplicities"))
    {
        const Json& m = j.at("multiplicities");
        if (!m.is_array() || m.size() != f.coeffs.size())
            bad("multiplicities must match coeffs");
        for (std::size_t i = 0; i < m.size(); ++i)
            if (!m[i].is_number_integer() || m[i].get<long>() != static_cast<long>(f.coeffs[i].size()))
                bad("multiplicities disagree with coefficient counts");
    }
    if (f.nodes.size() != f.coeffs.size())
        bad("nodes and coeffs differ in length");
    f.validate();
    return f;
}

Json to_json(const MomentSequence& mu)
{
    Json j{{"values", complex_array(mu.values)}};
    j["noise_bounds"] = mu.noise_bounds ? Json(*mu.noise_bounds) : Json(nullptr);
    return j;
}

MomentSequence moments_from_json(const Json& j)
{
    MomentSequence mu;
    mu.values = complex_array_from(field(j, "values"), "values");
    if (j.contains("noise_bounds") && !j.at("noise_bounds").is_null())
    {
        const Json& nb = j.at("noise_bounds");
        if (!nb.is_array())
            bad("noise_bounds must be an array or null");
        std::vector<double> b;
        for (const auto& e : nb)
            b.push_back(number(e, "noise bound"));
        mu.noise_bounds = std::move(b);
    }
    mu.validate();
    return mu;
}

Json to_json(const SolvabilityReport& r)
{
    return Json{{"rank", r.rank},
                {"solvable", r.solvable},
                {"stratum", stratum_name(r.stratum)},
                {"leading_minor", r.leading_minor},
                {"singular_values", r.singular_values}};
}

Json to_json(const DDSolution& s)
{
    return Json{{"w", complex_array(s.w)},
                {"beta", complex_array(s.beta)},
                {"condition_number", s.condition_number},
                {"residual", s.residual}};
}

Json to_json(const StabilityBounds& b)
{
    return Json{{"tau", b.tau}, {"coeffs", b.coeffs}, {"eps", b.eps},
                {"delta", b.delta}, {"s", b.s0},      {"r", b.r0}};
}

Json to_json(const ValidationReport& r)
{
    return Json{{"bounds", to_json(r.bounds)},
                {"empirical", Json{{"tau", r.max_tau_error}, {"coeffs", r.max_coeff_error}}},
                {"max_ratio", r.max_ratio},
                {"violations", r.violations},
                {"divergences", r.divergences},
                {"trials", r.trials},
                {"seed", r.seed}};
}

Json to_json(const FourierData& d)
{
    return Json{{"coeffs", complex_array(d.coeffs)}, {"M", d.M}, {"R", d.R}};
}

FourierData fourier_from_json(const Json& j)
{
    FourierData d;
    d.coeffs = complex_array_from(field(j, "coeffs"), "coeffs");
    const Json& M = field(j, "M");
    if (!M.is_number_integer() || M.get<long>() < 0)
        bad("M must be a nonnegative integer");
    d.M = M.get<int>();
    d.R = j.contains("R") ? number(j.at("R"), "R") : 0.0;
    if (d.coeffs.empty())
        bad("coeffs must not be empty");
    return d;
}

Json to_json(const PiecewiseModel& m)
{
    return Json{{"jumps", m.jumps},
                {"magnitudes", m.magnitudes},
                {"smooth", Json{{"coeffs", complex_array(m.smooth)}}}};
}

PiecewiseModel model_from_json(const Json& j)
{
    PiecewiseModel m;
    const Json& jumps = field(j, "jumps");
    const Json& mags = field(j, "magnitudes");
    if (!jumps.is_array() || !mags.is_array() || jumps.size() != mags.size())
        bad("jumps and magnitudes must be arrays of equal length");
    for (const auto& x : jumps)
        m.jumps.push_back(wrap_angle(number(x, "jump")));
    for (const auto& row : mags)
    {
        if (!row.is_array())
            bad("magnitudes entries must be arrays");
        std::vector<double> r;
        for (const auto& a : row)
            r.push_back(number(a, "magnitude"));
        m.magnitudes.push_back(std::move(r));
    }
    if (j.contains("smooth") && !j.at("smooth").is_null())
        m.smooth = complex_array_from(field(j.at("smooth"), "coeffs"), "smooth.coeffs");
    return m;
}

Json to_json(const JumpEstimate& e)
{
    return Json{{"xi", e.xi},
                {"magnitudes", e.magnitudes},
                {"root", complex_to_json(e.root)},
                {"root_residual", e.root_residual},
                {"branch", e.branch}};
}

Json to_json(const ConvergenceTable& t)
{
    Json rows = Json::array();
    for (const auto& r : t.rows)
    {
        Json values = Json::object();
        for (std::size_t m = 0; m < t.metrics.size(); ++m)
            values[t.metrics[m]] = std::isfinite(r.values[m]) ? Json(r.values[m]) : Json(nullptr);
        rows.push_back(Json{{t.x_label, r.x},
                            {"values", values},
                            {"ok", r.ok},
                            {"successes", r.successes},
                            {"failures", r.failures}});
    }
    Json slopes = Json::object();
    for (std::size_t m = 0; m < t.slopes.size(); ++m)
    {
        const SlopeFit& s = t.slopes[m];
        slopes[t.metrics[m]] = s.valid ? Json{{"slope", s.slope}, {"stderr", s.stderr_}, {"points", s.points}}
                                       : Json{{"slope", nullptr}, {"stderr", nullptr}, {"points", s.points}};
    }
    return Json{{"x", t.x_label}, {"metrics", t.metrics}, {"rows", rows}, {"slopes", slopes}};
}

} // namespace pronykit
