#ifndef PRONYKIT_JSON_IO_HPP
#define PRONYKIT_JSON_IO_HPP

#include <json.hpp>

#include "pronykit/bench.hpp"
#include "pronykit/divided_diff.hpp"
#include "pronykit/fourier.hpp"
#include "pronykit/prony_core.hpp"
#include "pronykit/solvability.hpp"
#include "pronykit/stability.hpp"

namespace pronykit
{

using Json = nlohmann::json;

// Complex numbers are {"re": x, "im": y}; a bare number is read as real.
// Malformed input raises Error(InvalidInput).

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);

Json to_json(const SpikeSignal& f);
SpikeSignal signal_from_json(const Json& j);

Json to_json(const MomentSequence& mu);
MomentSequence moments_from_json(const Json& j);

Json to_json(const SolvabilityReport& r);
Json to_json(const DDSolution& s);
Json to_json(const StabilityBounds& b);
Json to_json(const ValidationReport& r);

Json to_json(const FourierData& d);
FourierData fourier_from_json(const Json& j);

Json to_json(const PiecewiseModel& m);
PiecewiseModel model_from_json(const Json& j);

Json to_json(const JumpEstimate& e);
Json to_json(const ConvergenceTable& t);

} // namespace pronykit

#endif
