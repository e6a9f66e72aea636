#ifndef PRONYKIT_ORACLE_HPP
#define PRONYKIT_ORACLE_HPP

#include <optional>

#include "pronykit/prony_core.hpp"

namespace pronykit
{

/// Closed-form solver for two or four moments, independent of the Hankel
/// machinery. Order 1 is a = m_0, x = m_1 / m_0; order 2 solves the
/// two-term recurrence by the quadratic formula. Returns nullopt when no
/// signal of order <= d reproduces the data.
std::optional<SpikeSignal> oracle_prony_small(const MomentSequence& mu);

} // namespace pronykit

#endif
