#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "pronykit/oracle.hpp"
#include "pronykit/prony_solve.hpp"
#include "test_support.hpp"

using namespace pronykit;

namespace
{

MomentSequence moments(std::initializer_list<Complex> v)
{
    MomentSequence mu;
    mu.values.assign(v.begin(), v.end());
    return mu;
}

std::vector<Complex> sorted(std::vector<Complex> v)
{
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return v;
}

bool close(Complex a, Complex b, double tol = 1e-10)
{
    return std::abs(a - b) <= tol;
}

} // namespace

TEST_CASE("roots of simple monic polynomials")
{
    const std::vector<Complex> q1{-1, 0, 1};
    auto r1 = sorted(polynomial_roots(q1));
    CHECK(close(r1[0], -1.0));
    CHECK(close(r1[1], 1.0));

    const std::vector<Complex> q2{0, 0, 1};
    for (Complex z : polynomial_roots(q2))
        CHECK(std::abs(z) < 1e-8);

    const std::vector<Complex> q3{-6, 11, -6, 1};
    auto r3 = sorted(polynomial_roots(q3));
    CHECK(close(r3[0], 1.0));
    CHECK(close(r3[1], 2.0));
    CHECK(close(r3[2], 3.0));
}

TEST_CASE("polished roots have small residuals")
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial)
    {
        const int n = 1 + trial % 8;
        std::vector<Complex> c;
        for (int i = 0; i < n; ++i)
            c.push_back(testsupport::random_disk(rng, 2.0));
        c.push_back(1.0);
        double scale = 0.0;
        for (auto z : c)
            scale = std::max(scale, std::abs(z));
        const auto roots = polynomial_roots(c);
        CHECK(roots.size() == static_cast<std::size_t>(n));
        for (Complex z : roots)
            CHECK(std::abs(poly_eval(c, z)) <= 1e-8 * scale * std::max(1.0, std::pow(std::abs(z), n)));
    }
}

TEST_CASE("derivative of a polynomial")
{
    const std::vector<Complex> c{1, 2, 3};
    const auto d1 = poly_derivative(c);
    REQUIRE(d1.size() == 2);
    CHECK(d1[0] == Complex(2.0));
    CHECK(d1[1] == Complex(6.0));
    const auto d2 = poly_derivative(c, 2);
    REQUIRE(d2.size() == 1);
    CHECK(d2[0] == Complex(6.0));
}

TEST_CASE("solve a symmetric pair")
{
    const PronySolution sol = solve_prony(moments({2, 0, 2, 0}));
    REQUIRE(sol.signal.degree() == 2);
    const auto nodes = sorted(sol.signal.nodes);
    CHECK(close(nodes[0], -1.0));
    CHECK(close(nodes[1], 1.0));
    for (const auto& c : sol.signal.coeffs)
        CHECK(close(c[0], 1.0));
    const auto& Q = sol.rational.denominator;
    REQUIRE(Q.size() == 3);
    CHECK(close(Q[0], -1.0));
    CHECK(close(Q[1], 0.0));
    CHECK(close(Q[2], 1.0));
}

TEST_CASE("solve a single spike")
{
    const PronySolution sol = solve_prony(moments({1, 2}));
    REQUIRE(sol.signal.degree() == 1);
    CHECK(close(sol.signal.nodes[0], 2.0));
    CHECK(close(sol.signal.coeffs[0][0], 1.0));
}

TEST_CASE("solve detects a double node")
{
    const PronySolution sol = solve_prony(moments({1, 1, 0, 0}));
    CHECK(sol.report.rank == 2);
    REQUIRE(sol.signal.degree() == 1);
    REQUIRE(sol.signal.coeffs[0].size() == 2);
    CHECK(std::abs(sol.signal.nodes[0]) < 1e-7);
    CHECK(close(sol.signal.coeffs[0][0], 1.0, 1e-6));
    CHECK(close(sol.signal.coeffs[0][1], 1.0, 1e-6));
    CHECK(sol.residual < 1e-8);
}

TEST_CASE("solve reports unsolvable data")
{
    try
    {
        solve_prony(moments({0, 1}));
        FAIL("expected an error");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::Unsolvable);
    }
}

TEST_CASE("solve inverts the moment map on random signals")
{
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 120; ++trial)
    {
        const int d = 1 + trial % 6;
        const SpikeSignal f = testsupport::random_signal(rng, d, 0.1);
        const PronySolution sol = solve_prony(prony_mapping(f, 2 * d));
        const auto [node_err, coeff_err] = testsupport::signal_distance(f, sol.signal);
        CHECK(node_err <= 1e-7);
        CHECK(coeff_err <= 1e-6);
    }
}

TEST_CASE("recovered denominator satisfies the moment recurrence")
{
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 30; ++trial)
    {
        const int d = 1 + trial % 5;
        const SpikeSignal f = testsupport::random_signal(rng, d, 0.2);
        const auto mu = prony_mapping(f, 2 * d + 6);
        const Polynomial Q = prony_denominator(mu.values, d);
        double scale = 0.0;
        for (auto m : mu.values)
            scale = std::max(scale, std::abs(m));
        for (int k = 0; k + d < static_cast<int>(mu.values.size()); ++k)
        {
            // sum_i Q_i m_{k+i} = m_{k+d} - sum q_i m_{k+i}
            Complex r = 0.0;
            for (int i = 0; i <= d; ++i)
                r += Q[i] * mu.values[k + i];
            CHECK(std::abs(r) <= 1e-9 * scale);
        }
    }
}

TEST_CASE("expansion at infinity of simple fractions")
{
    SpikeSignal f{{2.0}, {{1.0}}};
    const auto c = stieltjes_taylor(f, 4);
    CHECK(c == std::vector<Complex>{1, 2, 4, 8});
    SpikeSignal g{{0.0}, {{1.0}}};
    CHECK(stieltjes_taylor(g, 4) == std::vector<Complex>{1, 0, 0, 0});
}

TEST_CASE("expansion at infinity equals the moments and sums to the rational function")
{
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 30; ++trial)
    {
        const int d = 1 + trial % 6;
        const SpikeSignal f = testsupport::random_signal(rng, d, 0.1);
        const auto c = stieltjes_taylor(f, 2 * d);
        const auto mu = prony_mapping(f, 2 * d);
        for (int k = 0; k < 2 * d; ++k)
            CHECK(std::abs(c[k] - mu.values[k]) <= 1e-10 * (1 + std::abs(mu.values[k])));

        // Partial sums of the series at |z| = 8 against direct evaluation.
        const Complex z = std::polar(8.0, 0.3 * trial);
        const auto series = stieltjes_taylor(f, 80);
        Complex sum = 0.0, zp = 1.0 / z;
        for (const auto& ck : series)
        {
            sum += ck * zp;
            zp /= z;
        }
        Complex direct = 0.0;
        for (std::size_t j = 0; j < f.nodes.size(); ++j)
        {
            double fact = 1.0;
            for (std::size_t l = 0; l < f.coeffs[j].size(); ++l)
            {
                if (l > 0)
                    fact *= static_cast<double>(l);
                direct += fact * f.coeffs[j][l] / std::pow(z - f.nodes[j], static_cast<int>(l + 1));
            }
        }
        CHECK(std::abs(sum - direct) <= 1e-10 * (1 + std::abs(direct)));
    }
}

TEST_CASE("solver agrees with the closed-form oracle on a small integer grid")
{
    int agree = 0, total = 0;
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
            for (int c = -2; c <= 2; ++c)
                for (int e = -2; e <= 2; ++e)
                {
                    const MomentSequence mu = moments({double(a), double(b), double(c), double(e)});
                    const auto expected = oracle_prony_small(mu);
                    std::optional<SpikeSignal> got;
                    try
                    {
                        got = solve_prony(mu).signal;
                    }
                    catch (const Error& err)
                    {
                        CHECK(err.code() == ErrorCode::Unsolvable);
                    }
                    ++total;
                    if (expected.has_value() != got.has_value())
                        continue;
                    if (expected)
                    {
                        const auto [ne, ce] = testsupport::signal_distance(*expected, *got);
                        if (ne > 1e-9 || ce > 1e-9)
                            continue;
                    }
                    ++agree;
                }
    CHECK(agree == total);
    CHECK(total == 625);
}

TEST_CASE("moment residual is relative")
{
    SpikeSignal f{{1.0}, {{2.0}}};
    const MomentSequence mu = moments({2, 2, 2, 2.2});
    CHECK(moment_residual(f, mu) == doctest::Approx(0.2 / 2.2));
}
