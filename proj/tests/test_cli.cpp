#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "cli.hpp"
#include "pronykit/fourier.hpp"
#include "pronykit/oracle.hpp"

using namespace pronykit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

struct Run
{
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class TempFile
{
public:
    explicit TempFile(const std::string& content)
    {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("pronykit_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".json");
        std::ofstream(path_) << content;
    }
    ~TempFile() { fs::remove(path_); }
    std::string str() const { return path_.string(); }

private:
    fs::path path_;
};

std::string moments_json(std::initializer_list<double> v)
{
    json values = json::array();
    for (double x : v)
        values.push_back({{"re", x}, {"im", 0.0}});
    return json{{"values", values}, {"noise_bounds", nullptr}}.dump();
}

double re(const json& z)
{
    return z.is_number() ? z.get<double>() : z.at("re").get<double>();
}

MomentSequence moments(std::initializer_list<double> v)
{
    MomentSequence mu;
    for (double x : v)
        mu.values.push_back(x);
    return mu;
}

} // namespace

TEST_CASE("solve a symmetric pair from the command line")
{
    TempFile in(moments_json({2, 0, 2, 0}));
    const Run r = run({"solve", "--input", in.str()});
    REQUIRE(r.code == kExitOk);
    const json j = json::parse(r.out);
    CHECK(j.at("rank") == 2);
    CHECK(j.at("stratum") == "sigma_r");
    const auto& nodes = j.at("signal").at("nodes");
    REQUIRE(nodes.size() == 2);
    CHECK(std::abs(std::abs(re(nodes[0])) - 1.0) < 1e-10);
    CHECK(std::abs(re(nodes[0]) + re(nodes[1])) < 1e-10);
    for (const auto& c : j.at("signal").at("coeffs"))
        CHECK(std::abs(re(c[0]) - 1.0) < 1e-10);
}

TEST_CASE("unsolvable data exits with code two and a JSON error")
{
    TempFile in(moments_json({0, 1}));
    const Run r = run({"solve", "--input", in.str()});
    CHECK(r.code == kExitUnsolvable);
    const json e = json::parse(r.err);
    CHECK(e.at("error").at("code") == "unsolvable");
    CHECK(e.at("error").at("report").at("stratum") == "sigma_prime_r");
    CHECK(r.out.empty());
}

TEST_CASE("plain-text errors on request")
{
    TempFile in(moments_json({0, 1}));
    const Run r = run({"--no-json-errors", "solve", "--input", in.str()});
    CHECK(r.code == kExitUnsolvable);
    CHECK(r.err.rfind("pronykit: unsolvable", 0) == 0);
}

TEST_CASE("single spike from the command line")
{
    TempFile in(moments_json({1, 2}));
    const Run r = run({"solve", "--input", in.str()});
    REQUIRE(r.code == kExitOk);
    const json j = json::parse(r.out);
    CHECK(std::abs(re(j.at("signal").at("nodes")[0]) - 2.0) < 1e-12);
    CHECK(std::abs(re(j.at("signal").at("coeffs")[0][0]) - 1.0) < 1e-12);
}

TEST_CASE("malformed input exits with code one")
{
    TempFile bad("{\"values\": 3}");
    CHECK(run({"solve", "--input", bad.str()}).code == kExitInvalid);
    TempFile broken("not json");
    CHECK(run({"classify", "--input", broken.str()}).code == kExitInvalid);
    CHECK(run({"solve", "--input", "/nonexistent/file.json"}).code == kExitInvalid);
    CHECK(run({"no-such-command"}).code == kExitInvalid);
}

TEST_CASE("classify and difference-basis solve")
{
    TempFile in(moments_json({1, 1, 0, 0}));
    const json c = json::parse(run({"classify", "--input", in.str()}).out);
    CHECK(c.at("rank") == 2);
    CHECK(c.at("solvable") == true);

    const Run r = run({"dd-solve", "--input", in.str()});
    REQUIRE(r.code == kExitOk);
    const json d = json::parse(r.out);
    CHECK(std::abs(re(d.at("beta")[0]) - 1.0) < 1e-6);
    CHECK(std::abs(re(d.at("beta")[1]) - 1.0) < 1e-6);
    CHECK(d.contains("condition_number"));
    CHECK(d.contains("signal"));
}

TEST_CASE("output file option")
{
    TempFile in(moments_json({1, 2}));
    TempFile out("");
    REQUIRE(run({"solve", "--input", in.str(), "--output", out.str()}).code == kExitOk);
    std::ifstream f(out.str());
    const json j = json::parse(f);
    CHECK(j.at("rank") == 1);
}

TEST_CASE("bounds with and without Monte Carlo")
{
    TempFile sig(R"({"nodes":[{"re":-1,"im":0},{"re":1,"im":0}],"coeffs":[[1],[1]]})");
    const Run b = run({"bounds", "--input", sig.str(), "--eps", "1e-6"});
    REQUIRE(b.code == kExitOk);
    const json j = json::parse(b.out);
    CHECK(j.at("bounds").at("tau")[0].get<double>() == doctest::Approx(2e-6));

    const Run mc = run({"bounds", "--input", sig.str(), "--eps", "1e-8", "--trials", "50", "--seed", "3"});
    REQUIRE(mc.code == kExitOk);
    const json k = json::parse(mc.out);
    CHECK(k.at("violations") == 0);
    CHECK(k.at("trials") == 50);
    CHECK(k.at("seed") == 3);

    CHECK(run({"bounds", "--input", sig.str(), "--trials", "5"}).code == kExitInvalid);
}

TEST_CASE("synthesize moments and Fourier data")
{
    TempFile sig(R"({"nodes":[0],"coeffs":[[0,1]]})");
    const json m = json::parse(run({"synth", "--input", sig.str()}).out);
    REQUIRE(m.at("values").size() == 4);
    CHECK(re(m.at("values")[1]) == 1.0);

    TempFile model(R"({"jumps":[0.5],"magnitudes":[[1.0,0.2]]})");
    const Run f = run({"synth", "--input", model.str(), "--M", "10"});
    REQUIRE(f.code == kExitOk);
    const json d = json::parse(f.out);
    CHECK(d.at("M") == 10);
    CHECK(d.at("coeffs").size() == 31);
    CHECK(run({"synth", "--input", model.str()}).code == kExitInvalid);
}

TEST_CASE("synthesize then reconstruct through files")
{
    TempFile model(R"({"jumps":[-1.0],"magnitudes":[[1.0,0.3]]})");
    TempFile data("");
    REQUIRE(run({"synth", "--input", model.str(), "--M", "128", "--output", data.str()}).code == kExitOk);
    const Run r = run({"reconstruct", "--input", data.str(), "--d", "1", "--mode", "full"});
    REQUIRE(r.code == kExitOk);
    const json j = json::parse(r.out);
    CHECK(j.at("model").at("jumps")[0].get<double>() == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(j.at("details").size() == 1);
    CHECK(run({"reconstruct", "--input", data.str(), "--d", "1", "--mode", "quarter"}).code == kExitInvalid);
}

TEST_CASE("sampling a model as CSV")
{
    TempFile zero(R"({"jumps":[],"magnitudes":[]})");
    const Run z = run({"sample", "--input", zero.str(), "--points", "4"});
    REQUIRE(z.code == kExitOk);
    std::istringstream lines(z.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "x,value");
    int rows = 0;
    while (std::getline(lines, line))
    {
        ++rows;
        CHECK(std::stod(line.substr(line.find(',') + 1)) == 0.0);
    }
    CHECK(rows == 4);

    TempFile jump(R"({"jumps":[0.3],"magnitudes":[[1.0]]})");
    const Run p = run({"sample", "--input", jump.str(), "--points", "1"});
    std::istringstream l2(p.out);
    std::getline(l2, line);
    REQUIRE(std::getline(l2, line));
    const double x = std::stod(line.substr(0, line.find(',')));
    const double v = std::stod(line.substr(line.find(',') + 1));
    CHECK(x == doctest::Approx(-M_PI));
    PiecewiseModel m;
    m.jumps = {0.3};
    m.magnitudes = {{1.0}};
    CHECK(v == doctest::Approx(phi_eval(m, -M_PI)).epsilon(1e-15));
    CHECK_FALSE(std::getline(l2, line));

    const Run res = run({"sample", "--input", jump.str(), "--points", "3", "--reference", jump.str()});
    std::istringstream l3(res.out);
    std::getline(l3, line);
    CHECK(line == "x,value,residual");
}

TEST_CASE("collision bench from the command line")
{
    const Run r = run({"bench-collision", "--h-grid", "1e-1,1e-2,1e-3,1e-4,1e-5"});
    REQUIRE(r.code == kExitOk);
    const json t = json::parse(r.out);
    CHECK(t.at("rows").size() == 5);
    CHECK(t.at("slopes").at("max_abs_a").at("slope").get<double>() == doctest::Approx(-1.0).epsilon(0.1));
    CHECK(std::abs(t.at("slopes").at("max_abs_beta").at("slope").get<double>()) <= 0.1);
}

TEST_CASE("Fourier bench requires a seed and grid")
{
    CHECK(run({"bench-fourier", "--d", "1", "--K", "1", "--M-grid", "32,64,128,256"}).code == kExitInvalid);
    const Run r = run({"bench-fourier", "--d", "1", "--K", "1", "--M-grid", "32,64,128,256,512,1024", "--trials",
                       "5", "--seed", "4"});
    REQUIRE(r.code == kExitOk);
    const json t = json::parse(r.out);
    CHECK(t.at("rows").size() == 6);
    CHECK(t.at("config").at("seed") == 4);
    CHECK(t.at("slopes").at("jump_error").at("points") == 4);
}

TEST_CASE("help exits cleanly")
{
    const Run r = run({"--help"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("solve") != std::string::npos);
}

TEST_CASE("closed-form oracle on small problems")
{
    const auto one = oracle_prony_small(moments({1, 2}));
    REQUIRE(one);
    CHECK(one->nodes[0] == Complex(2.0));
    CHECK(one->coeffs[0][0] == Complex(1.0));

    CHECK_FALSE(oracle_prony_small(moments({0, 1})));

    const auto pair = oracle_prony_small(moments({2, 0, 2, 0}));
    REQUIRE(pair);
    REQUIRE(pair->degree() == 2);
    CHECK(std::abs(pair->nodes[0] + pair->nodes[1]) < 1e-12);
    CHECK(std::abs(std::abs(pair->nodes[0]) - 1.0) < 1e-12);

    const auto dbl = oracle_prony_small(moments({1, 1, 0, 0}));
    REQUIRE(dbl);
    REQUIRE(dbl->degree() == 1);
    CHECK(dbl->coeffs[0].size() == 2);

    const auto empty = oracle_prony_small(moments({0, 0}));
    REQUIRE(empty);
    CHECK(empty->degree() == 0);
}
