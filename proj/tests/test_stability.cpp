#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pronykit/stability.hpp"
#include "test_support.hpp"

using namespace pronykit;

namespace
{

SpikeSignal pair_at_distance_two()
{
    return SpikeSignal{{-1.0, 1.0}, {{1.0}, {1.0}}};
}

SpikeSignal random_separated(std::mt19937_64& rng, int d, double sep)
{
    return testsupport::random_signal(rng, d, sep, 2.0);
}

// Central differences of the restricted moments, parameters ordered as
// a_{j,0..d_j-1}, tau_j per node.
CMatrix numerical_jacobian(const SpikeSignal& f, double h)
{
    std::vector<Complex*> params;
    SpikeSignal g = f;
    for (std::size_t j = 0; j < g.nodes.size(); ++j)
    {
        for (auto& a : g.coeffs[j])
            params.push_back(&a);
        params.push_back(&g.nodes[j]);
    }
    const CVector m0 = restricted_moments(f);
    CMatrix J(m0.size(), static_cast<Eigen::Index>(params.size()));
    for (std::size_t c = 0; c < params.size(); ++c)
    {
        const Complex saved = *params[c];
        *params[c] = saved + h;
        const CVector plus = restricted_moments(g);
        *params[c] = saved - h;
        const CVector minus = restricted_moments(g);
        *params[c] = saved;
        J.col(static_cast<Eigen::Index>(c)) = (plus - minus) / (2.0 * h);
    }
    return J;
}

} // namespace

TEST_CASE("bounds for two unit spikes at distance two")
{
    const StabilityBounds b = stability_bounds(pair_at_distance_two(), 1e-6);
    CHECK(b.s0 == 2);
    CHECK(b.r0 == 2);
    CHECK(b.delta == doctest::Approx(2.0));
    REQUIRE(b.tau.size() == 2);
    for (int j = 0; j < 2; ++j)
    {
        CHECK(b.tau[j] == doctest::Approx(2e-6).epsilon(1e-12));
        CHECK(b.coeffs[j][0] == doctest::Approx(5e-6).epsilon(1e-12));
    }
}

TEST_CASE("zero noise gives zero bounds")
{
    const StabilityBounds b = stability_bounds(pair_at_distance_two(), 0.0);
    for (double t : b.tau)
        CHECK(t == 0.0);
    for (const auto& row : b.coeffs)
        for (double c : row)
            CHECK(c == 0.0);
}

TEST_CASE("bounds are exactly homogeneous in the noise level")
{
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 20; ++trial)
    {
        const SpikeSignal f = random_separated(rng, 2 + trial % 3, 0.5);
        if (f.degree() < 2)
            continue;
        const StabilityBounds b1 = stability_bounds(f, 1e-8);
        const StabilityBounds b2 = stability_bounds(f, 2e-8);
        for (std::size_t j = 0; j < b1.tau.size(); ++j)
        {
            CHECK(b2.tau[j] == 2.0 * b1.tau[j]);
            for (std::size_t l = 0; l < b1.coeffs[j].size(); ++l)
                CHECK(b2.coeffs[j][l] == 2.0 * b1.coeffs[j][l]);
        }
    }
}

TEST_CASE("bounds follow the closed-form expressions for a confluent signal")
{
    // node 0 of multiplicity 2, node 1 simple: s = 2, r = 3, delta = 1
    SpikeSignal f{{0.0, 1.0}, {{0.5, 2.0}, {-1.0}}};
    const double eps = 1e-9;
    const StabilityBounds b = stability_bounds(f, eps);
    const double g = std::pow(2.0 / 1.0, 5);
    const double w = 0.5 + 5.0 / 1.0;
    CHECK(b.tau[0] == doctest::Approx(2.0 / 2.0 * g * eps / 2.0));
    CHECK(b.tau[1] == doctest::Approx(2.0 * g * eps));
    // l = 0: 2/0! g w^2 (1 + 0) eps; l = 1: 2/1! g w (1 + 0.5/2) eps
    CHECK(b.coeffs[0][0] == doctest::Approx(2.0 * g * w * w * eps));
    CHECK(b.coeffs[0][1] == doctest::Approx(2.0 * g * w * 1.25 * eps));
    CHECK(b.coeffs[1][0] == doctest::Approx(2.0 * g * w * eps));
}

TEST_CASE("degenerate inputs are rejected")
{
    auto expect_degenerate = [](const SpikeSignal& f) {
        try
        {
            stability_bounds(f, 1e-8);
            FAIL("expected an error");
        }
        catch (const Error& e)
        {
            CHECK(e.code() == ErrorCode::DegenerateInput);
        }
    };
    expect_degenerate(SpikeSignal{{0.0}, {{1.0}}});
    expect_degenerate(SpikeSignal{{0.0, 0.0}, {{1.0}, {1.0}}});
    expect_degenerate(SpikeSignal{{0.0, 1.0}, {{1.0, 0.0}, {1.0}}});
}

TEST_CASE("Jacobian of a single unit spike at the origin is the identity")
{
    const CMatrix J = restricted_jacobian(SpikeSignal{{0.0}, {{1.0}}});
    REQUIRE(J.rows() == 2);
    CHECK((J - CMatrix::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("Jacobian matches central differences")
{
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 40; ++trial)
    {
        const SpikeSignal f = random_separated(rng, 1 + trial % 4, 0.3);
        const CMatrix J = restricted_jacobian(f);
        const CMatrix Jn = numerical_jacobian(f, 1e-6);
        REQUIRE(J.rows() == Jn.rows());
        REQUIRE(J.cols() == Jn.cols());
        CHECK((J - Jn).cwiseAbs().maxCoeff() <= 1e-6 * (1.0 + J.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("Jacobian is nonsingular on random signals")
{
    std::mt19937_64 rng(89);
    int singular = 0;
    for (int trial = 0; trial < 1000; ++trial)
    {
        const SpikeSignal f = random_separated(rng, 1 + trial % 4, 0.1);
        const CMatrix J = restricted_jacobian(f);
        Eigen::FullPivLU<CMatrix> lu(J);
        if (!lu.isInvertible())
            ++singular;
    }
    CHECK(singular == 0);
}

TEST_CASE("Jacobian determinant scales with the top coefficients")
{
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 20; ++trial)
    {
        const SpikeSignal f = random_separated(rng, 1 + trial % 4, 0.3);
        SpikeSignal g = f;
        for (auto& row : g.coeffs)
            for (auto& a : row)
                a *= 2.0;
        const Complex ratio = restricted_jacobian(g).determinant() / restricted_jacobian(f).determinant();
        const double expected = std::pow(2.0, static_cast<double>(f.degree()));
        CHECK(std::abs(ratio - expected) <= 1e-9 * expected);
    }
}

TEST_CASE("Monte Carlo with zero noise has zero error")
{
    const ValidationReport r = validate_bounds(pair_at_distance_two(), 0.0, 10, 1);
    CHECK(r.violations == 0);
    CHECK(r.divergences == 0);
    for (double e : r.max_tau_error)
        CHECK(e == 0.0);
}

TEST_CASE("Monte Carlo respects the bounds for a separated pair")
{
    const ValidationReport r = validate_bounds(pair_at_distance_two(), 1e-8, 200, 7);
    CHECK(r.trials == 200);
    CHECK(r.violations == 0);
    CHECK(r.divergences == 0);
    CHECK(r.max_ratio <= 1.0);
    CHECK(r.max_ratio > 0.0);
}

TEST_CASE("Monte Carlo with nearly colliding nodes stays far below the loose bound")
{
    SpikeSignal f{{0.0, 1e-3}, {{1.0}, {1.0}}};
    const ValidationReport r = validate_bounds(f, 1e-12, 50, 11);
    CHECK(r.violations == 0);
    CHECK(r.max_ratio < 1e-3);
}

TEST_CASE("Monte Carlo is reproducible for a fixed seed")
{
    SpikeSignal f{{0.0, 1.0}, {{0.5, 2.0}, {-1.0}}};
    const ValidationReport a = validate_bounds(f, 1e-9, 40, 123);
    const ValidationReport b = validate_bounds(f, 1e-9, 40, 123);
    CHECK(a.max_ratio == b.max_ratio);
    CHECK(a.max_tau_error == b.max_tau_error);
}

TEST_CASE("bounds rely on nodes inside the unit disk")
{
    // With a node at 3 the moment map stretches perturbations beyond what
    // the (2/delta)^{s+r} factor accounts for.
    SpikeSignal far{{0.0, 3.0}, {{1.0}, {1.0}}};
    const ValidationReport r = validate_bounds(far, 1e-8, 200, 1);
    CHECK(r.violations > 0);
    CHECK(r.max_ratio > 1.0);

    SpikeSignal inside{{0.0, 1.0}, {{1.0}, {1.0}}};
    CHECK(validate_bounds(inside, 1e-8, 200, 1).violations == 0);
}
