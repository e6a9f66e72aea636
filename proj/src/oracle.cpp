#include "pronykit/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace pronykit
{

namespace
{

bool reproduces(const SpikeSignal& f, const MomentSequence& mu)
{
    for (const auto& c : f.coeffs)
        if (c.back() == Complex(0.0))
            return false;
    const auto m = prony_mapping(f, static_cast<int>(mu.values.size()));
    double scale = 1.0;
    for (const auto& v : mu.values)
        scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < mu.values.size(); ++k)
        if (std::abs(m.values[k] - mu.values[k]) > 1e-9 * scale)
            return false;
    return true;
}

// Order <= 1 candidates from m_0, m_1.
std::optional<SpikeSignal> order_one(const MomentSequence& mu)
{
    const Complex m0 = mu.values[0];
    const Complex m1 = mu.values[1];
    SpikeSignal f;
    if (m0 != Complex(0.0))
    {
        f.nodes = {m1 / m0};
        f.coeffs = {{m0}};
    }
    if (reproduces(f, mu))
        return f;
    return std::nullopt;
}

} // namespace

std::optional<SpikeSignal> oracle_prony_small(const MomentSequence& mu)
{
    const std::size_t n = mu.values.size();
    if (n != 2 && n != 4)
        throw Error(ErrorCode::InvalidInput, "oracle_prony_small: expects 2 or 4 moments");
    if (n == 2)
        return order_one(mu);

    const Complex m0 = mu.values[0], m1 = mu.values[1], m2 = mu.values[2], m3 = mu.values[3];
    const Complex D = m0 * m2 - m1 * m1;
    double scale = 1.0;
    for (const auto& v : mu.values)
        scale = std::max(scale, std::abs(v));
    // Any order-2 solution has D = det M_2 != 0; D = 0 leaves order <= 1.
    if (std::abs(D) <= 1e-12 * scale * scale)
        return order_one(mu);

    // m2 = q0 m0 + q1 m1, m3 = q0 m1 + q1 m2 (Cramer).
    const Complex q0 = (m2 * m2 - m1 * m3) / D;
    const Complex q1 = (m0 * m3 - m1 * m2) / D;
    // roots of z^2 - q1 z - q0
    const Complex disc = std::sqrt(q1 * q1 + 4.0 * q0);
    const Complex x1 = 0.5 * (q1 + disc);
    const Complex x2 = 0.5 * (q1 - disc);

    SpikeSignal f;
    if (std::abs(disc) <= 1e-12 * std::max(1.0, std::abs(q1)))
    {
        const Complex x = 0.5 * q1;
        f.nodes = {x};
        f.coeffs = {{m0, m1 - m0 * x}};
    }
    else
    {
        // a1 + a2 = m0, a1 x1 + a2 x2 = m1
        const Complex a1 = (m1 - m0 * x2) / (x1 - x2);
        f.nodes = {x1, x2};
        f.coeffs = {{a1}, {m0 - a1}};
    }
    if (reproduces(f, mu))
        return f;
    return std::nullopt;
}

} // namespace pronykit
