#pragma once

#include <string>

#include "json.hpp"

#include "regkit/invariance.hpp"
#include "regkit/sl2.hpp"

namespace regkit::io {

using Json = nlohmann::ordered_json;

/// Parses text, converting syntax errors to Error(Parse).
Json parse(const std::string& text);

/// Deterministic writer: fixed key order and 17 significant digits.
std::string dump(const Json& j, int indent = 2);

Json to_json(Complex z);  // number when real, [re, im] otherwise
Complex complex_from_json(const Json& j);

Json to_json(const PiecewisePoly& p);
PiecewisePoly poly_from_json(const Json& j);

Json to_json(const CoefficientSet& t);
CoefficientSet coeffs_from_json(const Json& j);

Json to_json(const FMatrix& f);
FMatrix fmatrix_from_json(const Json& j);

/// Keys "nu,i"; tau values are piecewise polynomials, c values numbers or
/// [re, im].
FamilyParams params_from_json(const Json& j);
Json to_json(const FamilyParams& p);

Json to_json(const CMatrix& m);
Json to_json(const EigenRecord& e);
Json to_json(const InvarianceReport& r);
Json to_json(const SpectralMapResult& r);
Json to_json(const WeightInvariance& w);
Json to_json(const DiscriminationResult& d);
Json to_json(const SL2Data& d);

}  // namespace regkit::io
