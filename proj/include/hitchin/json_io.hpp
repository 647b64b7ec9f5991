#pragma once

#include <string>

#include "json.hpp"

#include "hitchin/angle.hpp"
#include "hitchin/hyperelliptic.hpp"
#include "hitchin/sov.hpp"
#include "hitchin/spectral.hpp"

namespace hitchin {

using json = nlohmann::json;

// Complex numbers are [re, im] pairs throughout. Malformed input raises
// Error(InvalidArgument) naming the offending field.

json to_json(cplx z);
cplx complex_from_json(const json& j, const std::string& field);

json curve_to_json(const HyperellipticCurve& curve);
/// {"p": [...ascending], "genus": g}; "genus" is optional but must match.
HyperellipticCurve curve_from_json(const json& j);

json point_to_json(const CurvePoint& pt);
CurvePoint point_from_json(const json& j, const std::string& field);

/// family/rank/genus plus structured blocks and the flat "H" vector.
json hamiltonian_to_json(const HamiltonianVector& h);
/// Accepts "blocks" or the flat alias "H". `fallback` supplies
/// family/rank/genus when the object omits them.
HamiltonianVector hamiltonian_from_json(const json& j, const json& fallback = json::object());

RootSystem roots_from_json(const json& j);

json divisor_to_json(const SpectralDivisor& divisor);
SpectralDivisor divisor_from_json(const json& j);

/// {"method", "candidates": [hamiltonian + "residual"]}.
json solution_to_json(const SolutionSet& s);
/// {"basepoint", "phi"}.
json angles_to_json(const AngleVector& a);

/// Parses text; syntax errors become InvalidArgument with line and column.
json parse_json_text(const std::string& text, const std::string& source);
json read_json_file(const std::string& path);

}  // namespace hitchin
