#pragma once

#include <json.hpp>

#include "robba/checks.hpp"
#include "robba/herbrand.hpp"
#include "robba/nabla.hpp"

namespace robba {

// Interchange format. Every rational crosses the boundary as a "num/den"
// string; exponents and multiplicities are JSON integers. Emitted objects
// have sorted keys, so equal values serialize to identical bytes.
using Json = nlohmann::json;

Json field_to_json(const FieldPtr& k);
FieldPtr field_from_json(const Json& j);

Json elem_to_json(const FieldElem& x);
FieldElem elem_from_json(const FieldPtr& k, const Json& j);

Json series_to_json(const LaurentSeries& f);
LaurentSeries series_from_json(const FieldPtr& k, const Json& j);

Json module_to_json(const NablaModule& M);
NablaModule module_from_json(const Json& j);

Json herbrand_to_json(const HerbrandFn& f);
HerbrandFn herbrand_from_json(const Json& j);

Json breaks_to_json(const BreakData& b);
BreakData breaks_from_json(const Json& j);

Json matrix_to_json(const Matrix& A);
Json profile_to_json(const RadiusProfile& profile);
Json break_to_json(const BreakEstimate& est);
Json polygon_to_json(const HasseArfPolygon& poly);
Json reduce_to_json(const ReduceResult& res);
Json antecedent_to_json(const AntecedentResult& res);
Json hensel_to_json(const HenselResult& res);
Json report_to_json(const CheckReport& rep);

std::string ext_to_str(const ExtRat& x);
ExtRat ext_from_str(const std::string& s);

} // namespace robba
