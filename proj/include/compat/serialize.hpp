#pragma once

// nlohmann::json conversions for the domain types. Non-finite doubles are
// written as the strings "inf", "-inf" and "nan" so they survive a round trip.

#include <json.hpp>

#include "compat/asymptotic.hpp"
#include "compat/compatibility.hpp"
#include "compat/decisions.hpp"
#include "compat/exact.hpp"
#include "compat/interval.hpp"
#include "compat/prior.hpp"
#include "compat/simulate.hpp"
#include "compat/table.hpp"

// Table2x2 has no default state, so it converts through adl_serializer.
template <>
struct nlohmann::adl_serializer<compat::Table2x2> {
  static compat::Table2x2 from_json(const nlohmann::json& j);
  static void to_json(nlohmann::json& j, const compat::Table2x2& t);
};

namespace compat {

using nlohmann::json;

json number_to_json(double v);
double number_from_json(const json& j);

void to_json(json& j, const Measure& m);
void from_json(const json& j, Measure& m);

void to_json(json& j, const AssociationSummary& s);
void from_json(const json& j, AssociationSummary& s);

void to_json(json& j, const IntervalEstimate& iv);
void from_json(const json& j, IntervalEstimate& iv);

void to_json(json& j, const ExactPValue& p);
void from_json(const json& j, ExactPValue& p);

void to_json(json& j, const PointEstimate& e);
void from_json(const json& j, PointEstimate& e);

void to_json(json& j, const Chi2Result& r);
void from_json(const json& j, Chi2Result& r);

void to_json(json& j, const CompatibilityPoint& p);
void from_json(const json& j, CompatibilityPoint& p);

void to_json(json& j, const CompatibilityCurve& c);
void from_json(const json& j, CompatibilityCurve& c);

void to_json(json& j, const TestDecision& d);
void from_json(const json& j, TestDecision& d);

void to_json(json& j, const PowerSpec& s);
void from_json(const json& j, PowerSpec& s);

void to_json(json& j, const PowerPoint& p);
void from_json(const json& j, PowerPoint& p);

void to_json(json& j, const IntervalPrior& p);
void from_json(const json& j, IntervalPrior& p);

void to_json(json& j, const PriorData& p);
void from_json(const json& j, PriorData& p);

void to_json(json& j, const AugmentedFit& f);
void from_json(const json& j, AugmentedFit& f);

void to_json(json& j, const Scenario& s);
void from_json(const json& j, Scenario& s);

void to_json(json& j, const SimReport& r);
void from_json(const json& j, SimReport& r);

// Reads a JSON array of scenarios. Throws ParseError.
std::vector<Scenario> scenarios_from_json(const std::string& text);

}  // namespace compat
